#include "kodaira/catalog.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "kodaira/todd_coxeter.hpp"

namespace kodaira {

using nlohmann::json;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

CatalogAnnotations parse_annotations(const json& j) {
  CatalogAnnotations a;
  if (j.contains("cct")) a.cct = j["cct"].get<bool>();
  if (j.contains("abelian_normal_witness"))
    a.abelian_normal_witness = j["abelian_normal_witness"].get<std::vector<std::string>>();
  if (j.contains("witness_index")) a.witness_index = j["witness_index"].get<int>();
  if (j.contains("monolithic")) a.monolithic = j["monolithic"].get<bool>();
  if (j.contains("mon_order")) a.mon_order = j["mon_order"].get<int>();
  if (j.contains("aut_order")) a.aut_order = j["aut_order"].get<long long>();
  if (j.contains("structures_b2")) {
    const json& s = j["structures_b2"];
    CatalogAnnotations::StructuresB2 sb;
    sb.total = s["total"].get<long long>();
    sb.orbits = s["orbits"].get<long long>();
    sb.n = s.value("n", 2);
    sb.k1 = s["k1"].get<int>();
    sb.k2 = s["k2"].get<int>();
    sb.strong = s["strong"].get<bool>();
    a.structures_b2 = sb;
  }
  if (j.contains("h1")) {
    for (const json& v : j["h1"]) {
      CatalogAnnotations::H1Variant h;
      h.rank = v["rank"].get<int>();
      h.torsion = v["torsion"].get<std::vector<long long>>();
      if (v.contains("orbits")) h.orbits = v["orbits"].get<long long>();
      a.h1.push_back(std::move(h));
    }
  }
  if (j.contains("lift_over")) a.lift_over = j["lift_over"].get<std::string>();
  if (j.contains("lifts_per_base")) a.lifts_per_base = j["lifts_per_base"].get<int>();
  if (j.contains("generating_lifts_per_base"))
    a.generating_lifts_per_base = j["generating_lifts_per_base"].get<int>();
  if (j.contains("note")) a.note = j["note"].get<std::string>();
  return a;
}

}  // namespace

std::string Catalog::default_data_dir() {
  if (const char* env = std::getenv("KODAIRA_CATALOG_DIR")) return env;
#ifdef KODAIRA_DATA_DIR
  return KODAIRA_DATA_DIR;
#else
  return "data";
#endif
}

Catalog Catalog::load(const std::string& data_dir) {
  Catalog c;
  c.dir_ = data_dir.empty() ? default_data_dir() : data_dir;
  json manifest = json::parse(read_file(c.dir_ + "/manifest.json"));
  for (const json& e : manifest["entries"]) {
    CatalogEntry entry;
    entry.label = e["label"].get<std::string>();
    entry.file = e["file"].get<std::string>();
    entry.order = e["order"].get<int>();
    entry.ann = parse_annotations(e);
    c.index_[entry.label] = c.entries_.size();
    c.entries_.push_back(std::move(entry));
  }
  return c;
}

bool Catalog::has(const std::string& label) const { return index_.count(label) > 0; }

const CatalogEntry& Catalog::entry(const std::string& label) const {
  auto it = index_.find(label);
  if (it == index_.end())
    throw std::invalid_argument("unknown catalog label '" + label + "'");
  return entries_[it->second];
}

std::vector<std::string> Catalog::labels_with_order(int order) const {
  std::vector<std::string> out;
  for (const auto& e : entries_)
    if (e.order == order) out.push_back(e.label);
  return out;
}

Presentation Catalog::presentation(const std::string& label) const {
  const CatalogEntry& e = entry(label);
  Presentation P = parse_presentation(read_file(dir_ + "/catalog/" + e.file));
  if (P.label.empty()) P.label = e.label;
  return P;
}

const FiniteGroup& Catalog::group(const std::string& label) const {
  auto it = cache_.find(label);
  if (it != cache_.end()) return it->second;
  const CatalogEntry& e = entry(label);
  FiniteGroup G = todd_coxeter(presentation(label));
  G.label = e.label;
  if (G.order != e.order)
    throw std::runtime_error("catalog entry " + label + " realized order " +
                             std::to_string(G.order) + ", manifest says " +
                             std::to_string(e.order));
  return cache_.emplace(label, std::move(G)).first->second;
}

}  // namespace kodaira
