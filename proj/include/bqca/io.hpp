#ifndef BQCA_IO_HPP
#define BQCA_IO_HPP

// File formats: diagram CSV (header row of site indices, one row per step,
// >= 12 significant digits), plain PGM (P2) with the inverted grey map so
// value 1 renders black, series CSV (step,value), and the JSON schedule
// document.

#include "bqca/pulse.hpp"

#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

namespace bqca {

inline std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.15g", v);
  return buf;
}

inline void write_diagram_csv(const Eigen::MatrixXd& diagram, std::ostream& os) {
  for (Eigen::Index j = 0; j < diagram.cols(); ++j) {
    os << (j ? "," : "") << j;
  }
  os << "\n";
  for (Eigen::Index r = 0; r < diagram.rows(); ++r) {
    for (Eigen::Index j = 0; j < diagram.cols(); ++j) {
      os << (j ? "," : "") << format_double(diagram(r, j));
    }
    os << "\n";
  }
}

inline Eigen::MatrixXd parse_diagram_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw std::runtime_error("diagram csv: missing header");
  Eigen::Index cols = 1 + std::count(line.begin(), line.end(), ',');
  std::vector<double> values;
  Eigen::Index rows = 0;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    Eigen::Index c = 0;
    while (std::getline(ss, cell, ',')) {
      values.push_back(std::stod(cell));
      ++c;
    }
    if (c != cols) throw std::runtime_error("diagram csv: ragged row");
    ++rows;
  }
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = values[r * cols + c];
  }
  return m;
}

//! Plain PGM, maxval 255, pixel = 255 - round(255 v): value 1 is black,
//! matching diagrams whose captions use Black=1.  Time flows downward.
inline void write_diagram_pgm(const Eigen::MatrixXd& diagram, std::ostream& os) {
  os << "P2\n" << diagram.cols() << " " << diagram.rows() << "\n255\n";
  for (Eigen::Index r = 0; r < diagram.rows(); ++r) {
    for (Eigen::Index j = 0; j < diagram.cols(); ++j) {
      double v = std::min(1.0, std::max(0.0, diagram(r, j)));
      os << (j ? " " : "") << (255 - static_cast<int>(std::lround(255.0 * v)));
    }
    os << "\n";
  }
}

inline void write_series_csv(const std::vector<double>& series, std::ostream& os) {
  os << "step,value\n";
  for (size_t t = 0; t < series.size(); ++t) {
    os << t << "," << format_double(series[t]) << "\n";
  }
}

// ---------------------------------------------------------------------------
// Schedule serialization
// ---------------------------------------------------------------------------

inline const char* species_name(Species s) { return s == Species::A ? "A" : "B"; }

inline nlohmann::json schedule_to_json(const PulseSchedule& sch) {
  nlohmann::json elements = nlohmann::json::array();
  for (const auto& el : sch.elements) {
    nlohmann::json e;
    if (const auto* p = std::get_if<IsingPulse>(&el)) {
      e["type"] = "ising";
      e["dwell"] = p->dwell;
      e["species"] = species_name(p->updates);
    } else if (const auto* a = std::get_if<AsymIsingPulse>(&el)) {
      e["type"] = "ising_asym";
      e["dwell"] = a->dwell;
      e["g_even"] = a->g_even;
      e["g_odd"] = a->g_odd;
      e["species"] = species_name(a->updates);
    } else if (const auto* r = std::get_if<SpeciesRotation>(&el)) {
      e["type"] = "rotation";
      e["species"] = species_name(r->species);
      e["axis"] = {r->axis.x(), r->axis.y(), r->axis.z()};
      e["angle"] = r->angle;
    } else if (const auto* z = std::get_if<EndRotation>(&el)) {
      e["type"] = "end_rotation";
      e["end"] = (z->end == ChainEnd::Left) ? "left" : "right";
      e["angle"] = z->angle;
    }
    elements.push_back(std::move(e));
  }
  return nlohmann::json{{"g", sch.g}, {"total_time", sch.total_time()}, {"elements", elements}};
}

inline PulseSchedule schedule_from_json(const nlohmann::json& j) {
  PulseSchedule sch;
  sch.g = j.at("g").get<double>();
  auto parse_species = [](const std::string& s) {
    if (s == "A") return Species::A;
    if (s == "B") return Species::B;
    throw std::runtime_error("schedule json: bad species");
  };
  for (const auto& e : j.at("elements")) {
    std::string type = e.at("type").get<std::string>();
    if (type == "ising") {
      sch.elements.push_back(
          IsingPulse{e.at("dwell").get<double>(), parse_species(e.at("species"))});
    } else if (type == "ising_asym") {
      sch.elements.push_back(AsymIsingPulse{e.at("dwell").get<double>(),
                                            e.at("g_even").get<double>(),
                                            e.at("g_odd").get<double>(),
                                            parse_species(e.at("species"))});
    } else if (type == "rotation") {
      auto ax = e.at("axis");
      sch.elements.push_back(SpeciesRotation{
          parse_species(e.at("species")),
          Eigen::Vector3d{ax.at(0).get<double>(), ax.at(1).get<double>(), ax.at(2).get<double>()},
          e.at("angle").get<double>()});
    } else if (type == "end_rotation") {
      sch.elements.push_back(
          EndRotation{e.at("end").get<std::string>() == "left" ? ChainEnd::Left : ChainEnd::Right,
                      e.at("angle").get<double>()});
    } else {
      throw std::runtime_error("schedule json: unknown element type " + type);
    }
  }
  return sch;
}

//! FNV-1a 64-bit hash, hex-encoded; used for the run manifest.
inline std::string fnv1a_hex(const std::string& data) {
  uint64_t h = 1469598103934665603ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace bqca

#endif
