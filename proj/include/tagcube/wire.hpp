#pragma once

#include <tagcube/layout.hpp>
#include <tagcube/pipeline.hpp>

#include <string>

namespace tagcube {

inline constexpr int kWireVersion = 1;

/// Fixed-point with at most six fractional digits and no trailing zeros,
/// e.g. 3, 0.5, 0.333333.
std::string format_number(double value);

/// The single canonical response body:
/// {"version":1,"query":{...},"permalink":"...","entries":[...]}
std::string to_wire_json(const CloudResult& result);

/// Self-contained page for iframe embedding. Tags are spans carrying a
/// b<bucket> class; GLUED runs share a no-break wrapper.
std::string render_embed_html(const CloudResult& result);

/// One line per tag: term, weight, and the bucket as repeated '*'.
std::string render_text(const CloudResult& result);

}  // namespace tagcube
