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

#pragma once

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace teleop::xml {

/// Element node. Text content and comments are dropped; attributes keep document order.
struct Element {
  std::string name;
  std::vector<std::pair<std::string, std::string>> attributes;
  std::vector<Element> children;
  int line = 0;
  int column = 0;

  std::optional<std::string> attribute(std::string_view key) const;
  const Element* child(std::string_view tag) const;
  std::vector<const Element*> children_named(std::string_view tag) const;
};

/// Parses a document with a single root element. Supports the XML declaration,
/// processing instructions, comments, CDATA, DOCTYPE (skipped), the five predefined
/// entities and numeric character references. Throws ParseError on malformed input.
Element parse(std::string_view text);

}  // namespace teleop::xml
