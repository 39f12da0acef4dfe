#include <cctype>

#include "dtl/io.hpp"

namespace dtl {

namespace {

class TomlReader {
 public:
  explicit TomlReader(const std::string& text) : s_(text) {}

  Json parse() {
    Json root = Json::object();
    Json* table = &root;
    while (true) {
      skip_blank_lines();
      if (at_end()) break;
      if (peek() == '[') {
        table = header(root);
      } else {
        key_value(*table);
      }
      end_of_line();
    }
    return root;
  }

 private:
  [[noreturn]] void error(const std::string& what) const {
    fail(ErrorKind::ParseError, "TOML line " + std::to_string(line_) + ": " + what);
  }
  bool at_end() const { return pos_ >= s_.size(); }
  char peek() const { return at_end() ? '\0' : s_[pos_]; }
  char get() {
    if (at_end()) error("unexpected end of input");
    const char c = s_[pos_++];
    if (c == '\n') ++line_;
    return c;
  }
  void skip_spaces() {
    while (peek() == ' ' || peek() == '\t') ++pos_;
  }
  void skip_comment() {
    if (peek() == '#')
      while (!at_end() && peek() != '\n') ++pos_;
  }
  void skip_blank_lines() {
    while (true) {
      skip_spaces();
      skip_comment();
      if (peek() == '\n' || peek() == '\r') {
        get();
        continue;
      }
      return;
    }
  }
  // Whitespace, comments and newlines inside arrays and inline tables.
  void skip_layout() {
    while (true) {
      skip_spaces();
      skip_comment();
      if (peek() == '\n' || peek() == '\r') {
        get();
        continue;
      }
      return;
    }
  }
  void end_of_line() {
    skip_spaces();
    skip_comment();
    if (at_end()) return;
    if (peek() == '\r') get();
    if (get() != '\n') error("expected end of line");
  }
  void expect(char c) {
    skip_spaces();
    if (get() != c) error(std::string("expected '") + c + "'");
  }

  std::string key() {
    skip_spaces();
    if (peek() == '"') return string_value();
    std::string out;
    while (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_' || peek() == '-') out += get();
    if (out.empty()) error("expected a key");
    return out;
  }

  std::string string_value() {
    if (get() != '"') error("expected a string");
    std::string out;
    while (peek() != '"') {
      if (peek() == '\n' || at_end()) error("unterminated string");
      char c = get();
      if (c == '\\') {
        const char e = get();
        switch (e) {
          case 'n': c = '\n'; break;
          case 't': c = '\t'; break;
          case '"': c = '"'; break;
          case '\\': c = '\\'; break;
          default: error("unsupported escape");
        }
      }
      out += c;
    }
    get();
    return out;
  }

  Json value() {
    skip_spaces();
    const char c = peek();
    if (c == '"') return string_value();
    if (c == '{') return inline_table();
    if (c == '[') return array();
    if (c == 't' || c == 'f') {
      const std::string word = key();
      if (word == "true") return true;
      if (word == "false") return false;
      error("unknown literal " + word);
    }
    std::string num;
    if (c == '+' || c == '-') num += get();
    while (std::isdigit(static_cast<unsigned char>(peek())) || peek() == '_')
      if (get() != '_') num += s_[pos_ - 1];
    if (num.empty() || num == "+" || num == "-") error("expected a value");
    if (peek() == '.' || peek() == 'e' || peek() == 'E') error("floating literals are not accepted; write \"p/q\"");
    return std::stoll(num);
  }

  Json inline_table() {
    get();
    Json out = Json::object();
    skip_layout();
    if (peek() == '}') {
      get();
      return out;
    }
    while (true) {
      key_value(out);
      skip_layout();
      const char c = get();
      if (c == '}') return out;
      if (c != ',') error("expected ',' or '}' in inline table");
      skip_layout();
    }
  }

  Json array() {
    get();
    Json out = Json::array();
    while (true) {
      skip_layout();
      if (peek() == ']') {
        get();
        return out;
      }
      out.push_back(value());
      skip_layout();
      if (peek() == ',') get();
      else if (peek() != ']') error("expected ',' or ']' in array");
    }
  }

  void key_value(Json& table) {
    std::vector<std::string> path{key()};
    skip_spaces();
    while (peek() == '.') {
      get();
      path.push_back(key());
      skip_spaces();
    }
    expect('=');
    Json* target = &table;
    for (std::size_t i = 0; i + 1 < path.size(); ++i) target = &(*target)[path[i]];
    if (target->contains(path.back())) error("duplicate key " + path.back());
    (*target)[path.back()] = value();
  }

  Json* header(Json& root) {
    get();
    const bool array_of_tables = peek() == '[';
    if (array_of_tables) get();
    std::vector<std::string> path{key()};
    skip_spaces();
    while (peek() == '.') {
      get();
      path.push_back(key());
      skip_spaces();
    }
    expect(']');
    if (array_of_tables) expect(']');
    Json* target = &root;
    for (std::size_t i = 0; i + 1 < path.size(); ++i) {
      target = &(*target)[path[i]];
      if (target->is_array()) target = &target->back();
    }
    Json& slot = (*target)[path.back()];
    if (array_of_tables) {
      if (slot.is_null()) slot = Json::array();
      if (!slot.is_array()) error("[[" + path.back() + "]] clashes with an existing key");
      slot.push_back(Json::object());
      return &slot.back();
    }
    if (slot.is_null()) slot = Json::object();
    if (!slot.is_object()) error("[" + path.back() + "] clashes with an existing key");
    return &slot;
  }

  const std::string& s_;
  std::size_t pos_ = 0;
  int line_ = 1;
};

}  // namespace

Json parse_toml_subset(const std::string& text) { return TomlReader(text).parse(); }

}  // namespace dtl
