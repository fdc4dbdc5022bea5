#include "pdlogic/export.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#ifndef PDLOGIC_VERSION
#define PDLOGIC_VERSION "unknown"
#endif

namespace pdl {

std::string code_version() { return PDLOGIC_VERSION; }

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

ordered_json metadata_json(const ExportMeta& meta) {
  ordered_json doc;
  doc["command"] = meta.command;
  doc["code_version"] = code_version();
  doc["config"] = meta.config;
  doc["seeds"] = meta.seeds;
  doc["wall_time_s"] = meta.wall_time_s;
  if (!meta.extra.empty()) doc["summary"] = meta.extra;
  return doc;
}

namespace {

void write_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

std::filesystem::path with_suffix(const std::filesystem::path& stem, const char* ext) {
  return std::filesystem::path(stem.string() + ext);
}

void write_sidecar(const std::filesystem::path& stem, const ExportMeta& meta) {
  write_file(with_suffix(stem, ".json"), metadata_json(meta).dump(2) + "\n");
}

}  // namespace

void export_grid(const SweepGrid& grid, const std::filesystem::path& stem, const ExportMeta& meta) {
  if (!grid.complete()) throw std::runtime_error("export_grid: sweep is incomplete");
  std::ostringstream csv;
  const char* value_name = grid.mode == SweepMode::Classify ? "class" : "P";
  csv << grid.coupling.name << ',' << grid.tq.name << ',' << value_name << '\n';
  for (std::size_t i = 0; i < grid.coupling.axis.count; ++i) {
    for (std::size_t k = 0; k < grid.tq.axis.count; ++k) {
      csv << format_number(grid.coupling.axis.at(i)) << ',' << format_number(grid.tq.axis.at(k))
          << ',' << format_number(grid.at(i, k)) << '\n';
    }
  }
  write_file(with_suffix(stem, ".csv"), csv.str());
  write_sidecar(stem, meta);
}

void export_basins(const BasinMap& map, const std::filesystem::path& stem, const ExportMeta& meta) {
  const bool rotating = map.frame == BasinFrame::Rotating;
  std::ostringstream csv;
  csv << (rotating ? "X,Y,label" : "theta,theta_dot,label");
  if (rotating) csv << ",X_achieved,Y_achieved,r,phi";
  csv << '\n';
  for (std::size_t iy = 0; iy < map.y.count; ++iy) {
    for (std::size_t ix = 0; ix < map.x.count; ++ix) {
      const std::size_t c = iy * map.x.count + ix;
      csv << format_number(map.x.at(ix)) << ',' << format_number(map.y.at(iy)) << ','
          << static_cast<int>(map.labels[c]);
      if (rotating) {
        const bool reached = map.labels[c] != CellLabel::Unreachable;
        const double nan = std::nan("");
        csv << ',' << format_number(reached ? map.achieved[c].X : nan) << ','
            << format_number(reached ? map.achieved[c].Y : nan) << ','
            << format_number(reached ? std::abs(map.achieved_amplitude[c]) : nan) << ','
            << format_number(reached ? std::arg(map.achieved_amplitude[c]) : nan);
      }
      csv << '\n';
    }
  }
  write_file(with_suffix(stem, ".csv"), csv.str());
  write_sidecar(stem, meta);
}

void export_reset(const ResetTable& table, const std::filesystem::path& stem, const ExportMeta& meta) {
  std::ostringstream csv;
  csv << "Tq,delta_phi\n";
  for (std::size_t i = 0; i < table.tq.size(); ++i) {
    csv << format_number(table.tq[i]) << ',' << format_number(table.delta_phi[i]) << '\n';
  }
  write_file(with_suffix(stem, ".csv"), csv.str());
  write_sidecar(stem, meta);
}

void export_truth_table(const TruthTableResult& table, const std::filesystem::path& stem,
                        const ExportMeta& meta) {
  std::ostringstream csv;
  csv << "in1,in2,output,expected,in1_after,in2_after,class\n";
  for (const GateOutcome& row : table.rows) {
    csv << static_cast<int>(row.inputs[0]) << ',' << static_cast<int>(row.inputs[1]) << ','
        << static_cast<int>(row.output) << ',' << static_cast<int>(row.expected) << ','
        << static_cast<int>(row.inputs_after[0]) << ',' << static_cast<int>(row.inputs_after[1])
        << ',' << to_string(row.classification) << '\n';
  }
  write_file(with_suffix(stem, ".csv"), csv.str());
  write_sidecar(stem, meta);
}

void export_trajectory(const Trajectory& traj, const std::filesystem::path& stem,
                       const ExportMeta& meta) {
  static constexpr const char* kDpo[] = {"theta", "theta_dot"};
  static constexpr const char* kKpo[] = {"re_a", "im_a"};
  static constexpr const char* kDlm[] = {"re_a", "im_a", "re_b", "im_b"};
  const char* const* names = traj.model == ModelKind::Dpo   ? kDpo
                             : traj.model == ModelKind::Kpo ? kKpo
                                                            : kDlm;
  const std::size_t per_site = traj.dim / traj.sites;
  std::ostringstream csv;
  csv << 't';
  for (std::size_t s = 0; s < traj.sites; ++s) {
    for (std::size_t c = 0; c < per_site; ++c) csv << ',' << names[c] << '_' << s;
  }
  csv << '\n';
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    csv << format_number(traj.times[i]);
    for (double v : traj.row(i)) csv << ',' << format_number(v);
    csv << '\n';
  }
  write_file(with_suffix(stem, ".csv"), csv.str());
  write_sidecar(stem, meta);
}

}  // namespace pdl
