#pragma once

#include <json.hpp>

#include <filesystem>

namespace drs {

// Converts a layout XML export into the JSON descriptor shape:
//   <design id=".." width=".." height=".." rendition="..">
//     <element id=".." kind=".." x_min=".." y_min=".." x_max=".." y_max="..">
//       optional text content
//     </element>
//   </design>
// Missing required attributes raise ValidationError naming the element.
nlohmann::json layout_xml_to_descriptor(const std::filesystem::path& xml_path);

} // namespace drs
