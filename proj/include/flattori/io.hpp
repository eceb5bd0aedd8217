#pragma once

// Serialization: torus census records as JSONL, volume tables as CSV, and
// experiment reports as JSON.

#include <fstream>
#include <ostream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "flattori/experiments.hpp"
#include "flattori/tori.hpp"
#include "flattori/volume.hpp"

namespace flattori {

using json = nlohmann::json;

inline json torus_record_to_json(const TorusRecord& rec) {
  json j;
  j["d"] = rec.d;
  std::vector<int64_t> repr;
  for (int i = 0; i < rec.d; ++i)
    for (int k = 0; k < rec.d; ++k) repr.push_back(rec.repr(i, k));
  j["repr"] = repr;
  j["charpoly"] = rec.charpoly;
  j["disc"] = rec.disc;
  std::vector<double> lambda(rec.lambda.data(), rec.lambda.data() + rec.lambda.size());
  j["lambda"] = lambda;
  std::vector<std::vector<double>> periods;
  for (const Vec& b : rec.periods.basis)
    periods.emplace_back(b.data(), b.data() + b.size());
  j["periods"] = periods;
  j["vol_a"] = rec.vol_a;
  j["stabilized"] = rec.stabilized;
  j["class_key"] = rec.class_key;
  return j;
}

inline TorusRecord torus_record_from_json(const json& j) {
  TorusRecord rec;
  rec.d = j.at("d").get<int>();
  const auto repr = j.at("repr").get<std::vector<int64_t>>();
  if (static_cast<int>(repr.size()) != rec.d * rec.d)
    throw std::runtime_error("torus record: repr has wrong size");
  rec.repr = IMat(rec.d, rec.d);
  for (int i = 0; i < rec.d; ++i)
    for (int k = 0; k < rec.d; ++k) rec.repr(i, k) = repr[i * rec.d + k];
  rec.charpoly = j.at("charpoly").get<std::vector<int64_t>>();
  rec.disc = j.at("disc").get<int64_t>();
  const auto lambda = j.at("lambda").get<std::vector<double>>();
  rec.lambda = Eigen::Map<const Vec>(lambda.data(), static_cast<Eigen::Index>(lambda.size()));
  for (const auto& row : j.at("periods").get<std::vector<std::vector<double>>>())
    rec.periods.basis.push_back(
        Eigen::Map<const Vec>(row.data(), static_cast<Eigen::Index>(row.size())));
  rec.vol_a = j.at("vol_a").get<double>();
  rec.stabilized = j.at("stabilized").get<bool>();
  rec.class_key = j.at("class_key").get<std::string>();
  return rec;
}

inline void write_census_jsonl(std::ostream& out, const std::vector<TorusRecord>& census) {
  for (const auto& rec : census) out << torus_record_to_json(rec).dump() << '\n';
}

inline std::vector<TorusRecord> read_census_jsonl(std::istream& in) {
  std::vector<TorusRecord> census;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    census.push_back(torus_record_from_json(json::parse(line)));
  }
  return census;
}

inline void write_volume_csv(std::ostream& out, const VolumeTable& tab) {
  out << "d,t,volume,log_volume,strip_fraction\n";
  out.precision(12);
  for (std::size_t i = 0; i < tab.t.size(); ++i)
    out << tab.d << ',' << tab.t[i] << ',' << tab.volume[i] << ',' << tab.log_volume[i] << ','
        << tab.strip_fraction[i] << '\n';
}

inline json count_check_to_json(const CountCheckReport& rep) {
  json j;
  j["d"] = rep.d;
  j["census_complete"] = rep.census_complete;
  j["trend_decreasing"] = rep.trend_decreasing;
  j["rel_changes"] = rep.rel_changes;
  j["points"] = json::array();
  for (const auto& pt : rep.points)
    j["points"].push_back({{"T", pt.T},
                           {"classes", pt.classes},
                           {"sum_vol", pt.sum_vol},
                           {"ball_vol", pt.ball_vol},
                           {"ratio", pt.ratio}});
  return j;
}

inline json equidist_to_json(const EquidistReport& rep) {
  json j;
  j["d"] = rep.d;
  j["T"] = rep.T;
  j["classes"] = rep.classes;
  j["observables"] = json::array();
  for (const auto& o : rep.observables)
    j["observables"].push_back({{"name", o.name},
                                {"torus_mean", o.torus_mean},
                                {"torus_stderr", o.torus_stderr},
                                {"haar_mean", o.haar_mean},
                                {"haar_stderr", o.haar_stderr},
                                {"ratio", o.ratio}});
  j["escape"] = json::array();
  for (const auto& e : rep.escape)
    j["escape"].push_back({{"R", e.R}, {"torus_tail", e.torus_tail}, {"haar_tail", e.haar_tail}});
  return j;
}

inline json angular_to_json(const AngularReport& rep) {
  json j;
  j["t"] = rep.t;
  j["count"] = rep.count;
  j["harmonics"] = json::array();
  for (const auto& h : rep.harmonics)
    j["harmonics"].push_back(
        {{"name", h.name}, {"empirical", h.empirical}, {"limit", h.limit}, {"error", h.error}});
  return j;
}

inline void write_json_file(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  out << j.dump(2) << '\n';
}

}  // namespace flattori
