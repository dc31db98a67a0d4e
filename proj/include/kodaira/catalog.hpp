#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "kodaira/group.hpp"
#include "kodaira/presentation.hpp"

namespace kodaira {

/// Golden annotations attached to a catalog entry; absent fields mean "not
/// recorded". Values are used as expected test data by the report commands
/// and the acceptance suite.
struct CatalogAnnotations {
  std::optional<bool> cct;
  std::optional<std::vector<std::string>> abelian_normal_witness;  // generator words
  std::optional<int> witness_index;                                // [G:N], prime
  std::optional<bool> monolithic;
  std::optional<int> mon_order;
  std::optional<long long> aut_order;

  struct StructuresB2 {
    long long total = 0;
    long long orbits = 0;
    int n = 2;
    int k1 = 0, k2 = 0;
    bool strong = false;
  };
  std::optional<StructuresB2> structures_b2;

  struct H1Variant {
    int rank = 0;
    std::vector<long long> torsion;
    std::optional<long long> orbits;  // orbit count carrying this H1, if recorded
  };
  std::vector<H1Variant> h1;

  std::optional<std::string> lift_over;            // label of the quotient
  std::optional<int> lifts_per_base;               // relation-satisfying lifts
  std::optional<int> generating_lifts_per_base;
  std::optional<std::string> note;
};

struct CatalogEntry {
  std::string label;
  std::string file;
  int order = 0;
  CatalogAnnotations ann;
};

/// The shipped group catalog: presentation files plus a manifest with
/// expected orders and golden annotations.
class Catalog {
 public:
  /// Loads from a data directory containing manifest.json and catalog/*.grp.
  /// The default directory is taken from $KODAIRA_CATALOG_DIR, falling back
  /// to the compiled-in data path.
  static Catalog load(const std::string& data_dir = "");
  static std::string default_data_dir();

  const std::vector<CatalogEntry>& entries() const { return entries_; }
  bool has(const std::string& label) const;
  const CatalogEntry& entry(const std::string& label) const;

  /// Labels of cataloged groups with the given order, in manifest order.
  std::vector<std::string> labels_with_order(int order) const;

  /// Parses and enumerates the entry's presentation and validates the order
  /// against the manifest. Results are memoized per Catalog instance.
  const FiniteGroup& group(const std::string& label) const;

  /// The parsed presentation of an entry.
  Presentation presentation(const std::string& label) const;

 private:
  std::string dir_;
  std::vector<CatalogEntry> entries_;
  std::map<std::string, size_t> index_;
  mutable std::map<std::string, FiniteGroup> cache_;
};

}  // namespace kodaira
