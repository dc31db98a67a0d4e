#pragma once

#include <string>
#include <vector>

#include "kodaira/catalog.hpp"

namespace kodaira {

struct Report {
  std::string title;
  std::vector<std::string> headers;
  std::vector<std::vector<std::string>> rows;
  bool ok = true;
  std::vector<std::string> mismatches;  // human-readable diffs vs golden values
};

enum class ReportFormat { Markdown, Csv, Json };

/// CCT classification of all cataloged non-abelian groups of one order,
/// diffed against the golden verdicts; also re-checks the stored
/// abelian-normal-subgroup witnesses (abelian, normal, prime index).
Report run_cct_report(const Catalog& cat, int order);

/// The order-64 structure table: monolithic flag, |Aut|, structure
/// existence with (|K1|,|K2|)/strongness from a first-k search, golden
/// totals and orbit arithmetic. With extended=true the full count-only
/// enumeration replaces the golden totals by computed ones.
Report run_order64_report(const Catalog& cat, bool extended = false, int threads = 1);

/// H1 of the branched cover for every group carrying golden H1 data; groups
/// with two recorded torsion types are scanned across spread-out structure
/// samples until both appear.
Report run_h1_report(const Catalog& cat, int threads = 1);

/// Numeric invariant columns for the order-64 table rows plus the
/// three-parameter family profile.
Report run_invariants_report(const Catalog& cat);

/// Dispatch by table name: cct-36 .. cct-60, order64-structures, h1-table,
/// invariants-table.
Report run_report(const Catalog& cat, const std::string& table,
                  bool extended = false, int threads = 1);

std::string render_report(const Report& r, ReportFormat f);

}  // namespace kodaira
