#include "medley/xml.hpp"

#include <cctype>

#include "medley/errors.hpp"

namespace medley::xml {

std::optional<std::string> Node::attribute(std::string_view key) const {
  for (const auto& [k, v] : attributes)
    if (k == key) return v;
  return std::nullopt;
}

const Node* Node::child(std::string_view name) const {
  for (const auto& c : children)
    if (c.name == name) return &c;
  return nullptr;
}

std::vector<const Node*> Node::children_named(std::string_view name) const {
  std::vector<const Node*> out;
  for (const auto& c : children)
    if (c.name == name) out.push_back(&c);
  return out;
}

namespace {

class Parser {
 public:
  explicit Parser(std::string_view input) : in_(input) {}

  Node parse_document() {
    skip_prolog();
    Node root = parse_element();
    skip_misc();
    if (pos_ != in_.size()) fail("trailing content after root element");
    return root;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw MedleyError(Errc::XmlSyntax, what + " at offset " + std::to_string(pos_));
  }

  char peek() const { return pos_ < in_.size() ? in_[pos_] : '\0'; }
  bool eof() const { return pos_ >= in_.size(); }
  bool starts_with(std::string_view s) const { return in_.substr(pos_, s.size()) == s; }

  void expect(char c) {
    if (eof() || in_[pos_] != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  void skip_ws() {
    while (!eof() && std::isspace(static_cast<unsigned char>(in_[pos_]))) ++pos_;
  }

  void skip_until(std::string_view marker, const char* what) {
    size_t found = in_.find(marker, pos_);
    if (found == std::string_view::npos) fail(std::string("unterminated ") + what);
    pos_ = found + marker.size();
  }

  void skip_prolog() {
    skip_ws();
    while (!eof()) {
      if (starts_with("<?")) {
        skip_until("?>", "processing instruction");
      } else if (starts_with("<!--")) {
        skip_until("-->", "comment");
      } else if (starts_with("<!DOCTYPE")) {
        skip_doctype();
      } else {
        break;
      }
      skip_ws();
    }
    if (eof() || peek() != '<') fail("expected root element");
  }

  void skip_misc() {
    skip_ws();
    while (!eof() && (starts_with("<!--") || starts_with("<?"))) {
      skip_until(starts_with("<!--") ? std::string_view("-->") : std::string_view("?>"), "trailing node");
      skip_ws();
    }
  }

  void skip_doctype() {
    pos_ += 9;  // past "<!DOCTYPE"
    int depth = 0;
    while (!eof()) {
      char c = in_[pos_++];
      if (c == '[') ++depth;
      else if (c == ']') --depth;
      else if (c == '>' && depth == 0) return;
    }
    fail("unterminated DOCTYPE");
  }

  static bool is_name_start(char c) {
    return std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == ':';
  }
  static bool is_name_char(char c) {
    return is_name_start(c) || std::isdigit(static_cast<unsigned char>(c)) || c == '-' || c == '.';
  }

  std::string parse_name() {
    if (eof() || !is_name_start(peek())) fail("expected name");
    size_t start = pos_;
    while (!eof() && is_name_char(in_[pos_])) ++pos_;
    return std::string(in_.substr(start, pos_ - start));
  }

  void append_reference(std::string& out) {
    ++pos_;  // past '&'
    size_t end = in_.find(';', pos_);
    if (end == std::string_view::npos || end - pos_ > 10) fail("malformed reference");
    std::string_view ref = in_.substr(pos_, end - pos_);
    pos_ = end + 1;
    if (ref == "lt") out += '<';
    else if (ref == "gt") out += '>';
    else if (ref == "amp") out += '&';
    else if (ref == "apos") out += '\'';
    else if (ref == "quot") out += '"';
    else if (!ref.empty() && ref[0] == '#') {
      uint32_t cp = 0;
      bool hex = ref.size() > 1 && (ref[1] == 'x' || ref[1] == 'X');
      for (size_t i = hex ? 2 : 1; i < ref.size(); ++i) {
        char c = ref[i];
        int digit;
        if (c >= '0' && c <= '9') digit = c - '0';
        else if (hex && c >= 'a' && c <= 'f') digit = c - 'a' + 10;
        else if (hex && c >= 'A' && c <= 'F') digit = c - 'A' + 10;
        else { fail("malformed character reference"); }
        cp = cp * (hex ? 16 : 10) + digit;
      }
      append_utf8(out, cp);
    } else {
      fail("unknown entity &" + std::string(ref) + ";");
    }
  }

  static void append_utf8(std::string& out, uint32_t cp) {
    if (cp < 0x80) {
      out += static_cast<char>(cp);
    } else if (cp < 0x800) {
      out += static_cast<char>(0xC0 | (cp >> 6));
      out += static_cast<char>(0x80 | (cp & 0x3F));
    } else if (cp < 0x10000) {
      out += static_cast<char>(0xE0 | (cp >> 12));
      out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
      out += static_cast<char>(0x80 | (cp & 0x3F));
    } else {
      out += static_cast<char>(0xF0 | (cp >> 18));
      out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
      out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
      out += static_cast<char>(0x80 | (cp & 0x3F));
    }
  }

  std::string parse_attribute_value() {
    if (eof() || (peek() != '"' && peek() != '\'')) fail("expected quoted attribute value");
    char quote = in_[pos_++];
    std::string value;
    while (!eof() && in_[pos_] != quote) {
      if (in_[pos_] == '&') append_reference(value);
      else if (in_[pos_] == '<') fail("'<' in attribute value");
      else value += in_[pos_++];
    }
    expect(quote);
    return value;
  }

  Node parse_element() {
    expect('<');
    Node node;
    node.name = parse_name();
    for (;;) {
      skip_ws();
      if (eof()) fail("unterminated start tag");
      if (peek() == '/') {
        ++pos_;
        expect('>');
        return node;  // empty element
      }
      if (peek() == '>') {
        ++pos_;
        break;
      }
      std::string key = parse_name();
      skip_ws();
      expect('=');
      skip_ws();
      node.attributes.emplace_back(std::move(key), parse_attribute_value());
    }
    parse_content(node);
    return node;
  }

  void parse_content(Node& node) {
    for (;;) {
      if (eof()) fail("unterminated element <" + node.name + ">");
      if (peek() == '<') {
        if (starts_with("</")) {
          pos_ += 2;
          std::string closing = parse_name();
          if (closing != node.name)
            fail("mismatched close tag </" + closing + "> for <" + node.name + ">");
          skip_ws();
          expect('>');
          return;
        }
        if (starts_with("<!--")) {
          skip_until("-->", "comment");
        } else if (starts_with("<![CDATA[")) {
          pos_ += 9;
          size_t end = in_.find("]]>", pos_);
          if (end == std::string_view::npos) fail("unterminated CDATA");
          node.text += std::string(in_.substr(pos_, end - pos_));
          pos_ = end + 3;
        } else if (starts_with("<?")) {
          skip_until("?>", "processing instruction");
        } else {
          node.children.push_back(parse_element());
        }
      } else if (peek() == '&') {
        append_reference(node.text);
      } else {
        node.text += in_[pos_++];
      }
    }
  }

  std::string_view in_;
  size_t pos_ = 0;
};

}  // namespace

Node parse(std::string_view input) {
  // Tolerate a UTF-8 byte-order mark.
  if (input.substr(0, 3) == "\xEF\xBB\xBF") input.remove_prefix(3);
  return Parser(input).parse_document();
}

}  // namespace medley::xml
