#pragma once

#include <iosfwd>
#include <string>

#include "ktag/runtime.hpp"
#include "ktag/verdict.hpp"

namespace ktag {

/// JSON Lines trace: one header record, then one record per event.
/// Writing is canonical (fixed key order), so identical runs serialize to
/// identical bytes and a parse/serialize round-trip is exact.
std::string trace_to_jsonl(const Run& run);
void write_trace(const Run& run, const std::string& path);

Run trace_from_jsonl(const std::string& text);
Run read_trace(const std::string& path);

std::string verdict_to_json(const Verdict& v);

}  // namespace ktag
