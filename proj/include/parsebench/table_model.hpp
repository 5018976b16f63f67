#pragma once

// Ordered labeled trees for competition-style HTML tables.
//
// The accepted dialect is deliberately narrow: table, thead, tbody, tr and td
// as structure; b, i, strike, sup and sub as inline styles inside cells;
// colspan/rowspan as the only meaningful attributes. Everything else is
// rejected so that drift in a submission's markup surfaces as an error
// instead of a silently different tree.

#include <array>
#include <cctype>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "parsebench/errors.hpp"
#include "parsebench/utf8.hpp"

namespace parsebench {

enum class StyleTag : std::uint8_t { Bold, Italic, Strike, Sup, Sub };

inline constexpr std::array<StyleTag, 5> kAllStyles = {
    StyleTag::Bold, StyleTag::Italic, StyleTag::Strike, StyleTag::Sup,
    StyleTag::Sub};

inline std::string_view style_name(StyleTag s) {
  switch (s) {
    case StyleTag::Bold: return "b";
    case StyleTag::Italic: return "i";
    case StyleTag::Strike: return "strike";
    case StyleTag::Sup: return "sup";
    case StyleTag::Sub: return "sub";
  }
  return "?";
}

inline std::optional<StyleTag> parse_style_name(std::string_view name) {
  for (StyleTag s : kAllStyles) {
    if (style_name(s) == name) return s;
  }
  return std::nullopt;
}

// Small value set over the five style tags.
class StyleSet {
 public:
  constexpr StyleSet() = default;
  constexpr StyleSet(std::initializer_list<StyleTag> styles) {
    for (StyleTag s : styles) insert(s);
  }

  constexpr void insert(StyleTag s) { bits_ |= bit(s); }
  constexpr bool contains(StyleTag s) const { return (bits_ & bit(s)) != 0; }
  constexpr bool empty() const { return bits_ == 0; }

  // Parses a comma separated list such as "b,i". Throws on unknown names.
  static StyleSet parse(std::string_view list) {
    StyleSet out;
    while (!list.empty()) {
      const auto comma = list.find(',');
      std::string_view item = list.substr(0, comma);
      while (!item.empty() && item.front() == ' ') item.remove_prefix(1);
      while (!item.empty() && item.back() == ' ') item.remove_suffix(1);
      if (!item.empty()) {
        auto s = parse_style_name(item);
        if (!s) {
          throw std::invalid_argument("unknown style tag '" +
                                      std::string(item) + "'");
        }
        out.insert(*s);
      }
      if (comma == std::string_view::npos) break;
      list.remove_prefix(comma + 1);
    }
    return out;
  }

  std::string to_string() const {
    std::string out;
    for (StyleTag s : kAllStyles) {
      if (!contains(s)) continue;
      if (!out.empty()) out += ',';
      out += style_name(s);
    }
    return out;
  }

  friend constexpr bool operator==(StyleSet, StyleSet) = default;

 private:
  static constexpr std::uint8_t bit(StyleTag s) {
    return static_cast<std::uint8_t>(1u << static_cast<unsigned>(s));
  }
  std::uint8_t bits_ = 0;
};

enum class TokenKind : std::uint8_t { Char, StyleOpen, StyleClose };

// One unit of cell content: a single unicode scalar, or one style tag
// boundary.
struct Token {
  TokenKind kind = TokenKind::Char;
  char32_t value = 0;  // code point for Char, StyleTag for style tokens

  static constexpr Token character(char32_t cp) { return {TokenKind::Char, cp}; }
  static constexpr Token open(StyleTag s) {
    return {TokenKind::StyleOpen, static_cast<char32_t>(s)};
  }
  static constexpr Token close(StyleTag s) {
    return {TokenKind::StyleClose, static_cast<char32_t>(s)};
  }

  bool is_style() const { return kind != TokenKind::Char; }
  StyleTag style() const { return static_cast<StyleTag>(value); }

  friend constexpr bool operator==(const Token&, const Token&) = default;
};

using TokenSeq = std::vector<Token>;

enum class NodeTag : std::uint8_t { Table, Thead, Tbody, Tr, Td };

inline std::string_view tag_name(NodeTag t) {
  switch (t) {
    case NodeTag::Table: return "table";
    case NodeTag::Thead: return "thead";
    case NodeTag::Tbody: return "tbody";
    case NodeTag::Tr: return "tr";
    case NodeTag::Td: return "td";
  }
  return "?";
}

inline std::optional<NodeTag> parse_tag_name(std::string_view name) {
  for (NodeTag t : {NodeTag::Table, NodeTag::Thead, NodeTag::Tbody,
                    NodeTag::Tr, NodeTag::Td}) {
    if (tag_name(t) == name) return t;
  }
  return std::nullopt;
}

struct TreeNode {
  NodeTag tag = NodeTag::Table;
  std::uint32_t colspan = 1;
  std::uint32_t rowspan = 1;
  TokenSeq content;  // only ever non-empty on Td
  std::vector<TreeNode> children;

  bool operator==(const TreeNode& other) const {
    return tag == other.tag && colspan == other.colspan &&
           rowspan == other.rowspan && content == other.content &&
           children == other.children;
  }
};

// Recursive node count.
inline std::size_t count_nodes(const TreeNode& n) {
  std::size_t total = 1;
  for (const auto& c : n.children) total += count_nodes(c);
  return total;
}

// A validated table tree with its node count cached.
class TableTree {
 public:
  TableTree() : size_(1) {}

  explicit TableTree(TreeNode root) : root_(std::move(root)) {
    if (root_.tag != NodeTag::Table) {
      throw std::invalid_argument("table tree root must be <table>");
    }
    validate(root_);
    size_ = count_nodes(root_);
  }

  const TreeNode& root() const { return root_; }
  std::size_t size() const { return size_; }

  friend bool operator==(const TableTree& a, const TableTree& b) {
    return a.root_ == b.root_;
  }

 private:
  static void validate(const TreeNode& n) {
    if (n.colspan < 1 || n.rowspan < 1) {
      throw std::invalid_argument("span must be >= 1");
    }
    if (n.tag == NodeTag::Td && !n.children.empty()) {
      throw std::invalid_argument("td nodes cannot have children");
    }
    if (n.tag != NodeTag::Td && !n.content.empty()) {
      throw std::invalid_argument("only td nodes carry content");
    }
    for (const auto& c : n.children) validate(c);
  }

  TreeNode root_;
  std::size_t size_;
};

inline std::size_t tree_size(const TableTree& t) { return count_nodes(t.root()); }

enum class Complexity : std::uint8_t { Simple, Complex };

inline std::string_view complexity_name(Complexity c) {
  return c == Complexity::Simple ? "simple" : "complex";
}

namespace detail {

inline bool any_spanning_cell(const TreeNode& n) {
  if (n.tag == NodeTag::Td && (n.colspan > 1 || n.rowspan > 1)) return true;
  for (const auto& c : n.children) {
    if (any_spanning_cell(c)) return true;
  }
  return false;
}

inline void strip_node(TreeNode& n, StyleSet styles) {
  if (!n.content.empty()) {
    std::erase_if(n.content, [styles](const Token& t) {
      return t.is_style() && styles.contains(t.style());
    });
  }
  for (auto& c : n.children) strip_node(c, styles);
}

inline char ascii_lower(char c) {
  return static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
}

inline bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f';
}

inline bool is_name_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) != 0;
}

struct Attribute {
  std::string name;
  std::string value;
};

struct Tag {
  std::string name;  // lowercased
  bool closing = false;
  bool self_closing = false;
  std::vector<Attribute> attributes;
};

// Reads a tag starting at s[pos] == '<'. On success advances `pos` past '>'.
// Returns nullopt if the text at `pos` is not a well-formed tag; `pos` is
// left untouched in that case.
inline std::optional<Tag> read_tag(std::string_view s, std::size_t& pos) {
  std::size_t p = pos;
  if (p >= s.size() || s[p] != '<') return std::nullopt;
  ++p;
  Tag tag;
  if (p < s.size() && s[p] == '/') {
    tag.closing = true;
    ++p;
  }
  while (p < s.size() && is_name_char(s[p])) tag.name += ascii_lower(s[p++]);
  if (tag.name.empty()) return std::nullopt;
  for (;;) {
    while (p < s.size() && is_space(s[p])) ++p;
    if (p >= s.size()) return std::nullopt;
    if (s[p] == '>') {
      ++p;
      break;
    }
    if (s[p] == '/') {
      if (p + 1 < s.size() && s[p + 1] == '>') {
        tag.self_closing = true;
        p += 2;
        break;
      }
      return std::nullopt;
    }
    if (tag.closing) return std::nullopt;
    Attribute attr;
    while (p < s.size() && !is_space(s[p]) && s[p] != '=' && s[p] != '>' &&
           s[p] != '/' && s[p] != '<' && s[p] != '"' && s[p] != '\'') {
      attr.name += ascii_lower(s[p++]);
    }
    if (attr.name.empty()) return std::nullopt;
    while (p < s.size() && is_space(s[p])) ++p;
    if (p < s.size() && s[p] == '=') {
      ++p;
      while (p < s.size() && is_space(s[p])) ++p;
      if (p >= s.size()) return std::nullopt;
      if (s[p] == '"' || s[p] == '\'') {
        const char quote = s[p++];
        const auto end = s.find(quote, p);
        if (end == std::string_view::npos) return std::nullopt;
        attr.value = std::string(s.substr(p, end - p));
        p = end + 1;
      } else {
        while (p < s.size() && !is_space(s[p]) && s[p] != '>') {
          attr.value += s[p++];
        }
      }
    }
    tag.attributes.push_back(std::move(attr));
  }
  pos = p;
  return tag;
}

inline std::string describe(const Tag& t) {
  return std::string(t.closing ? "</" : "<") + t.name + ">";
}

inline std::uint32_t parse_span(const std::string& name,
                                const std::string& value) {
  if (value.empty() || value.size() > 9) {
    throw MalformedHtml(name + " value '" + value + "' is not a valid span");
  }
  std::uint32_t out = 0;
  for (char c : value) {
    if (c < '0' || c > '9') {
      throw MalformedHtml(name + " value '" + value + "' is not an integer");
    }
    out = out * 10 + static_cast<std::uint32_t>(c - '0');
  }
  if (out < 1) throw MalformedHtml(name + " must be >= 1, got " + value);
  return out;
}

// Decodes an entity starting at s[pos] == '&'.
inline char32_t read_entity(std::string_view s, std::size_t& pos) {
  const auto semi = s.find(';', pos);
  if (semi == std::string_view::npos || semi - pos > 12) {
    throw MalformedCell("unterminated or bare '&' in cell content");
  }
  const std::string_view body = s.substr(pos + 1, semi - pos - 1);
  char32_t cp = 0;
  if (body == "amp") {
    cp = U'&';
  } else if (body == "lt") {
    cp = U'<';
  } else if (body == "gt") {
    cp = U'>';
  } else if (body == "quot") {
    cp = U'"';
  } else if (body == "apos") {
    cp = U'\'';
  } else if (body.size() >= 2 && body[0] == '#') {
    const bool hex = body[1] == 'x' || body[1] == 'X';
    const std::string_view digits = body.substr(hex ? 2 : 1);
    if (digits.empty()) throw MalformedCell("empty numeric character reference");
    std::uint64_t v = 0;
    for (char c : digits) {
      int d = -1;
      if (c >= '0' && c <= '9') d = c - '0';
      else if (hex && c >= 'a' && c <= 'f') d = c - 'a' + 10;
      else if (hex && c >= 'A' && c <= 'F') d = c - 'A' + 10;
      if (d < 0) {
        throw MalformedCell("bad numeric character reference &" +
                            std::string(body) + ";");
      }
      v = v * (hex ? 16 : 10) + static_cast<std::uint64_t>(d);
      if (v > 0x10FFFF) break;
    }
    if (v == 0 || v > 0x10FFFF || !utf8::is_scalar_value(static_cast<char32_t>(v))) {
      throw MalformedCell("numeric character reference &" + std::string(body) +
                          "; is not a unicode scalar value");
    }
    cp = static_cast<char32_t>(v);
  } else {
    throw MalformedCell("unsupported entity &" + std::string(body) + ";");
  }
  pos = semi + 1;
  return cp;
}

// Finds the end of a td's inner content: the first "</td" followed by
// optional whitespace and '>'. Returns {inner_end, after_close}.
inline std::optional<std::pair<std::size_t, std::size_t>> find_cell_end(
    std::string_view s, std::size_t from) {
  std::size_t p = from;
  while ((p = s.find('<', p)) != std::string_view::npos) {
    if (p + 4 <= s.size() && s[p + 1] == '/' && ascii_lower(s[p + 2]) == 't' &&
        ascii_lower(s[p + 3]) == 'd') {
      std::size_t q = p + 4;
      while (q < s.size() && is_space(s[q])) ++q;
      if (q < s.size() && s[q] == '>') return std::pair{p, q + 1};
    }
    ++p;
  }
  return std::nullopt;
}

}  // namespace detail

// Splits the raw inner HTML of one td into content tokens. Entities are
// decoded, style tags become StyleOpen/StyleClose tokens, and every other
// tag is rejected.
inline TokenSeq tokenize_cell(std::string_view raw) {
  TokenSeq out;
  out.reserve(raw.size());
  std::size_t pos = 0;
  while (pos < raw.size()) {
    const char c = raw[pos];
    if (c == '<') {
      auto tag = detail::read_tag(raw, pos);
      if (!tag) throw MalformedCell("bare '<' or malformed tag in cell content");
      if (auto style = parse_style_name(tag->name)) {
        if (tag->self_closing) {
          throw MalformedCell("self-closing style tag " + detail::describe(*tag));
        }
        out.push_back(tag->closing ? Token::close(*style) : Token::open(*style));
      } else if (parse_tag_name(tag->name)) {
        throw MalformedCell("structural tag " + detail::describe(*tag) +
                            " inside a cell");
      } else {
        throw MalformedCell("unsupported tag " + detail::describe(*tag) +
                            " inside a cell");
      }
    } else if (c == '&') {
      out.push_back(Token::character(detail::read_entity(raw, pos)));
    } else {
      auto cp = utf8::decode(raw, pos);
      if (!cp) throw MalformedCell("invalid UTF-8 in cell content");
      out.push_back(Token::character(*cp));
    }
  }
  return out;
}

// Parses a single <table>...</table> fragment.
inline TableTree parse_table_html(std::string_view html) {
  using detail::is_space;
  std::size_t pos = 0;
  auto skip_space = [&] {
    while (pos < html.size() && is_space(html[pos])) ++pos;
  };

  std::vector<TreeNode> stack;
  std::optional<TreeNode> finished;

  skip_space();
  while (pos < html.size()) {
    if (finished) {
      throw MalformedHtml("content after closing </table>");
    }
    if (html[pos] != '<') {
      throw MalformedHtml("text outside of a cell at offset " +
                          std::to_string(pos));
    }
    const std::size_t tag_pos = pos;
    auto tag = detail::read_tag(html, pos);
    if (!tag) {
      throw MalformedHtml("malformed tag at offset " + std::to_string(tag_pos));
    }
    auto node_tag = parse_tag_name(tag->name);
    if (!node_tag) {
      throw MalformedHtml("unsupported tag " + detail::describe(*tag) +
                          " outside of a cell");
    }
    if (tag->self_closing) {
      throw MalformedHtml("self-closing " + detail::describe(*tag));
    }

    if (tag->closing) {
      if (stack.empty() || stack.back().tag != *node_tag) {
        throw MalformedHtml(
            "unbalanced " + detail::describe(*tag) +
            (stack.empty() ? std::string()
                           : ", expected </" +
                                 std::string(tag_name(stack.back().tag)) + ">"));
      }
      TreeNode done = std::move(stack.back());
      stack.pop_back();
      if (stack.empty()) {
        finished = std::move(done);
      } else {
        stack.back().children.push_back(std::move(done));
      }
      skip_space();
      continue;
    }

    const NodeTag parent = stack.empty() ? NodeTag::Td : stack.back().tag;
    bool allowed = false;
    switch (*node_tag) {
      case NodeTag::Table: allowed = stack.empty(); break;
      case NodeTag::Thead:
      case NodeTag::Tbody: allowed = !stack.empty() && parent == NodeTag::Table; break;
      case NodeTag::Tr:
        allowed = !stack.empty() &&
                  (parent == NodeTag::Table || parent == NodeTag::Thead ||
                   parent == NodeTag::Tbody);
        break;
      case NodeTag::Td: allowed = !stack.empty() && parent == NodeTag::Tr; break;
    }
    if (!allowed) {
      throw MalformedHtml(
          detail::describe(*tag) + " not allowed " +
          (stack.empty() ? std::string("at top level")
                         : "inside <" + std::string(tag_name(parent)) + ">"));
    }

    TreeNode node;
    node.tag = *node_tag;
    if (*node_tag != NodeTag::Td) {
      stack.push_back(std::move(node));
      skip_space();
      continue;
    }

    for (const auto& attr : tag->attributes) {
      if (attr.name == "colspan") {
        node.colspan = detail::parse_span(attr.name, attr.value);
      } else if (attr.name == "rowspan") {
        node.rowspan = detail::parse_span(attr.name, attr.value);
      }
    }
    auto end = detail::find_cell_end(html, pos);
    if (!end) throw MalformedHtml("unclosed <td>");
    node.content = tokenize_cell(html.substr(pos, end->first - pos));
    pos = end->second;
    stack.back().children.push_back(std::move(node));
    skip_space();
  }

  if (!stack.empty()) {
    throw MalformedHtml("unclosed <" + std::string(tag_name(stack.back().tag)) +
                        "> at end of input");
  }
  if (!finished) throw MalformedHtml("no <table> element");
  return TableTree(std::move(*finished));
}

namespace detail {

inline void write_content(std::string& out, const TokenSeq& content) {
  for (const Token& t : content) {
    switch (t.kind) {
      case TokenKind::StyleOpen:
        out += '<';
        out += style_name(t.style());
        out += '>';
        break;
      case TokenKind::StyleClose:
        out += "</";
        out += style_name(t.style());
        out += '>';
        break;
      case TokenKind::Char:
        switch (t.value) {
          case U'&': out += "&amp;"; break;
          case U'<': out += "&lt;"; break;
          case U'>': out += "&gt;"; break;
          case U'"': out += "&quot;"; break;
          default: utf8::append(out, t.value);
        }
        break;
    }
  }
}

inline void write_node(std::string& out, const TreeNode& n) {
  out += '<';
  out += tag_name(n.tag);
  if (n.colspan != 1) out += " colspan=\"" + std::to_string(n.colspan) + "\"";
  if (n.rowspan != 1) out += " rowspan=\"" + std::to_string(n.rowspan) + "\"";
  out += '>';
  write_content(out, n.content);
  for (const auto& c : n.children) write_node(out, c);
  out += "</";
  out += tag_name(n.tag);
  out += '>';
}

}  // namespace detail

// Canonical HTML rendering; parse_table_html(to_html(t)) == t.
inline std::string to_html(const TableTree& t) {
  std::string out;
  detail::write_node(out, t.root());
  return out;
}

// Complex iff any cell spans more than one row or column.
inline Complexity classify_complexity(const TableTree& t) {
  return detail::any_spanning_cell(t.root()) ? Complexity::Complex
                                              : Complexity::Simple;
}

inline TableTree strip_style(const TableTree& t, StyleSet styles) {
  if (styles.empty()) return t;
  TreeNode root = t.root();
  detail::strip_node(root, styles);
  return TableTree(std::move(root));
}

}  // namespace parsebench
