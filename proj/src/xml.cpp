// Copyright 2026 The Teleop Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "teleop/xml.hpp"

#include <cctype>

#include "teleop/errors.hpp"

namespace teleop::xml {

std::optional<std::string> Element::attribute(std::string_view key) const {
  for (const auto& [k, v] : attributes) {
    if (k == key) {
      return v;
    }
  }
  return std::nullopt;
}

const Element* Element::child(std::string_view tag) const {
  for (const auto& c : children) {
    if (c.name == tag) {
      return &c;
    }
  }
  return nullptr;
}

std::vector<const Element*> Element::children_named(std::string_view tag) const {
  std::vector<const Element*> out;
  for (const auto& c : children) {
    if (c.name == tag) {
      out.push_back(&c);
    }
  }
  return out;
}

namespace {

class Reader {
 public:
  explicit Reader(std::string_view text) : text_(text) {}

  Element document() {
    skip_misc();
    if (at_end()) {
      fail("document has no root element");
    }
    if (!starts_with("<")) {
      fail("expected '<'");
    }
    Element root = element();
    skip_misc();
    if (!at_end()) {
      fail("content after root element");
    }
    return root;
  }

 private:
  bool at_end() const { return pos_ >= text_.size(); }
  char peek() const { return at_end() ? '\0' : text_[pos_]; }
  bool starts_with(std::string_view s) const { return text_.substr(pos_, s.size()) == s; }

  void advance(std::size_t n = 1) {
    for (std::size_t i = 0; i < n && pos_ < text_.size(); ++i, ++pos_) {
      if (text_[pos_] == '\n') {
        ++line_;
        column_ = 1;
      } else {
        ++column_;
      }
    }
  }

  [[noreturn]] void fail(const std::string& what) const { throw ParseError("xml: " + what, line_, column_); }

  void expect(std::string_view s) {
    if (!starts_with(s)) {
      fail("expected '" + std::string(s) + "'");
    }
    advance(s.size());
  }

  void skip_ws() {
    while (!at_end() && std::isspace(static_cast<unsigned char>(peek()))) {
      advance();
    }
  }

  void skip_until(std::string_view terminator, const char* what) {
    while (!at_end() && !starts_with(terminator)) {
      advance();
    }
    if (at_end()) {
      fail(std::string("unterminated ") + what);
    }
    advance(terminator.size());
  }

  // Declarations, processing instructions, comments and DOCTYPE around the root.
  void skip_misc() {
    for (;;) {
      skip_ws();
      if (starts_with("<?")) {
        skip_until("?>", "processing instruction");
      } else if (starts_with("<!--")) {
        skip_until("-->", "comment");
      } else if (starts_with("<!DOCTYPE")) {
        skip_until(">", "DOCTYPE");
      } else {
        return;
      }
    }
  }

  static bool name_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.' || c == ':';
  }

  std::string name() {
    const std::size_t start = pos_;
    if (at_end() || !(std::isalpha(static_cast<unsigned char>(peek())) || peek() == '_' || peek() == ':')) {
      fail("expected a name");
    }
    while (!at_end() && name_char(peek())) {
      advance();
    }
    return std::string(text_.substr(start, pos_ - start));
  }

  std::string decode_entity() {
    // Positioned after '&'.
    const std::size_t semi = text_.find(';', pos_);
    if (semi == std::string_view::npos || semi - pos_ > 10) {
      fail("malformed entity reference");
    }
    const std::string_view ent = text_.substr(pos_, semi - pos_);
    std::string out;
    if (ent == "lt") {
      out = "<";
    } else if (ent == "gt") {
      out = ">";
    } else if (ent == "amp") {
      out = "&";
    } else if (ent == "quot") {
      out = "\"";
    } else if (ent == "apos") {
      out = "'";
    } else if (!ent.empty() && ent[0] == '#') {
      unsigned long code = 0;
      try {
        code = ent.size() > 1 && (ent[1] == 'x' || ent[1] == 'X')
                   ? std::stoul(std::string(ent.substr(2)), nullptr, 16)
                   : std::stoul(std::string(ent.substr(1)), nullptr, 10);
      } catch (const std::exception&) {
        fail("malformed character reference");
      }
      if (code < 0x80) {
        out.push_back(static_cast<char>(code));
      } else {
        out = "?";
      }
    } else {
      fail("unknown entity '&" + std::string(ent) + ";'");
    }
    advance(ent.size() + 1);
    return out;
  }

  std::string attribute_value() {
    const char quote = peek();
    if (quote != '"' && quote != '\'') {
      fail("attribute value must be quoted");
    }
    advance();
    std::string value;
    while (!at_end() && peek() != quote) {
      if (peek() == '<') {
        fail("'<' in attribute value");
      }
      if (peek() == '&') {
        advance();
        value += decode_entity();
      } else {
        value.push_back(peek());
        advance();
      }
    }
    if (at_end()) {
      fail("unterminated attribute value");
    }
    advance();
    return value;
  }

  Element element() {
    Element el;
    el.line = line_;
    el.column = column_;
    expect("<");
    el.name = name();
    for (;;) {
      const bool had_space = !at_end() && std::isspace(static_cast<unsigned char>(peek()));
      skip_ws();
      if (at_end()) {
        fail("unterminated start tag <" + el.name + ">");
      }
      if (starts_with("/>")) {
        advance(2);
        return el;
      }
      if (peek() == '>') {
        advance();
        break;
      }
      if (!had_space) {
        fail("expected whitespace between attributes");
      }
      std::string key = name();
      skip_ws();
      expect("=");
      skip_ws();
      std::string value = attribute_value();
      if (el.attribute(key)) {
        fail("duplicate attribute '" + key + "'");
      }
      el.attributes.emplace_back(std::move(key), std::move(value));
    }

    // Content.
    for (;;) {
      if (at_end()) {
        fail("unterminated element <" + el.name + ">");
      }
      if (starts_with("</")) {
        advance(2);
        const std::string closing = name();
        if (closing != el.name) {
          fail("mismatched closing tag </" + closing + "> for <" + el.name + ">");
        }
        skip_ws();
        expect(">");
        return el;
      }
      if (starts_with("<!--")) {
        skip_until("-->", "comment");
      } else if (starts_with("<![CDATA[")) {
        skip_until("]]>", "CDATA section");
      } else if (starts_with("<?")) {
        skip_until("?>", "processing instruction");
      } else if (peek() == '<') {
        el.children.push_back(element());
      } else if (peek() == '&') {
        advance();
        decode_entity();
      } else {
        advance();
      }
    }
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int column_ = 1;
};

}  // namespace

Element parse(std::string_view text) { return Reader(text).document(); }

}  // namespace teleop::xml
