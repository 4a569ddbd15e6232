#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "qpass/error.hpp"
#include "qpass/field_value.hpp"
#include "qpass/synth.hpp"

namespace qpass {

enum class Verb { ingest, partition, value, score, rank, report, synth, all };

std::optional<Verb> parse_verb(std::string_view name);

struct RunConfig {
    std::filesystem::path events;
    std::filesystem::path roster;
    std::filesystem::path out = "out";
    /// Restrict partition / value to one team; empty means every team.
    std::string team;
    ValuationConfig valuation;
    std::size_t min_passes = 100;
    std::uint64_t seed = 0;
    /// Passes drawn per player in trajectory figures.
    std::size_t top_n = 30;
    /// Worker threads for per-team valuation; 0 uses the hardware concurrency.
    std::size_t threads = 0;
    SyntheticLeagueSpec synth;
    /// Style applied to every synthetic team.
    TeamStyle synth_style;
};

struct ReportBundle {
    /// Paths relative to the output directory, sorted.
    std::vector<std::string> files;
    std::filesystem::path manifest;
};

/// Runs `verb` and everything it depends on, then writes `manifest.txt` listing every
/// file under the output directory with its SHA-256. Inputs are checked before any
/// output is written.
ReportBundle run_pipeline(const RunConfig& cfg, Verb verb);

/// Stable process exit code for each failure class.
int exit_code(ErrorKind kind);

std::string sha256_hex(const std::filesystem::path& file);

}  // namespace qpass
