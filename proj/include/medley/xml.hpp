#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace medley::xml {

// Minimal strict XML document model. Enough of the language for MusicXML
// and container manifests: elements, attributes, character data, CDATA,
// comments, processing instructions, DOCTYPE (skipped), and the standard
// character/entity references. Namespaces are kept verbatim in names.
struct Node {
  std::string name;
  std::vector<std::pair<std::string, std::string>> attributes;
  std::vector<Node> children;   // element children, in document order
  std::string text;             // concatenated character data of this element

  std::optional<std::string> attribute(std::string_view key) const;
  const Node* child(std::string_view name) const;  // first match or null
  std::vector<const Node*> children_named(std::string_view name) const;
};

// Parses one document and returns its root element.
// Throws MedleyError(Errc::XmlSyntax) with a byte offset on malformed input.
Node parse(std::string_view input);

}  // namespace medley::xml
