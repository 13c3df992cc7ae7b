#pragma once

#include <string>
#include <string_view>

#include <json.hpp>

#include "mcsg/edit_command.hpp"
#include "mcsg/mcsg.hpp"
#include "mcsg/view.hpp"

namespace mcsg {

inline constexpr int kMcsgVersion = 2;

/// Persistent document: nodes, channel and community edges, level count,
/// edit log, dataset name and build configuration. Hybrid edges are view
/// data and never written.
nlohmann::json export_json(const Mcsg& graph);
std::string export_string(const Mcsg& graph);

/// Inverse of export_json. Schema violations, unknown versions and dangling
/// references raise a format error whose message starts with the JSON
/// pointer of the offending value.
Mcsg import_json(const nlohmann::json& doc);
Mcsg import_string(std::string_view text);

nlohmann::json edit_command_to_json(const EditCommand& cmd, const Mcsg& graph);
/// `base` is the JSON pointer used in error messages.
EditCommand edit_command_from_json(const nlohmann::json& doc, const Mcsg& graph,
                                   const std::string& base = "");

nlohmann::json node_ref_to_json(const NodeRef& ref, const Mcsg& graph);
nlohmann::json view_to_json(const McsgView& view, const Mcsg& graph);

}  // namespace mcsg
