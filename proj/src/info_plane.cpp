#include "maxent/info_plane.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "maxent/error.hpp"

namespace maxent {

std::vector<std::size_t> default_schedule(std::size_t max_epoch) {
  std::vector<std::size_t> out{0};
  for (std::size_t decade = 1;; decade *= 10) {
    for (std::size_t m : {1, 2, 5}) {
      const std::size_t e = m * decade;
      if (e > max_epoch) {
        if (out.back() != max_epoch) out.push_back(max_epoch);
        return out;
      }
      out.push_back(e);
    }
  }
}

Trajectory track(const std::vector<Snapshot>& snapshots, const SampleSet& data, std::size_t bins,
                 std::uint64_t seed) {
  if (snapshots.empty()) throw Error(ErrorKind::kInvalidArgument, "track needs at least one snapshot");
  if (bins < 2) throw Error(ErrorKind::kRangeError, "bins must be >= 2");

  const auto inputs = data.inputs();
  const auto labels = data.labels();
  const auto x_symbols = discretize(inputs, bins);

  Trajectory traj;
  traj.estimator = EstimatorInfo{bins, data.size(), seed};
  for (const auto& [epoch, net] : snapshots) {
    const std::size_t L = net.depth();
    std::vector<std::vector<std::vector<double>>> acts(L);
    for (auto& layer : acts) layer.reserve(data.size());
    for (const Sample& s : data.rows()) {
      ForwardResult fr = forward(net, s.input);
      for (std::size_t l = 0; l < L; ++l) acts[l].push_back(std::move(fr.activations[l]));
    }
    for (std::size_t l = 0; l < L; ++l) {
      const auto t_symbols = discretize(acts[l], bins);
      traj.points.push_back(InfoPlanePoint{epoch, l + 1, empirical_mi(x_symbols, t_symbols),
                                           empirical_mi(t_symbols, labels)});
    }
  }
  std::stable_sort(traj.points.begin(), traj.points.end(), [](const auto& a, const auto& b) {
    return std::pair(a.epoch, a.layer) < std::pair(b.epoch, b.layer);
  });
  return traj;
}

IbCorollary verify_ib_corollary(const Instance& inst, const ConditionalTable& solved) {
  if (inst.n_features() > kMaxFeatures) {
    throw Error(ErrorKind::kTooManyFeatures, "IB check enumerates at most 16 features");
  }
  JointTable joint = inst.joint;
  if (!solved.probs.empty()) {
    if (solved.x_size != inst.x_size() || solved.y_size != inst.y_size()) {
      throw Error(ErrorKind::kDimensionMismatch, "solved conditional does not match instance alphabets");
    }
    const auto px = inst.joint.marginal(0);
    std::vector<double> w(solved.probs.size());
    for (std::size_t x = 0; x < solved.x_size; ++x)
      for (std::size_t y = 0; y < solved.y_size; ++y) w[x * solved.y_size + y] = px[x] * solved(x, y);
    joint = JointTable::from_weights({solved.x_size, solved.y_size}, std::move(w));
  }
  const JointTable triple = induce_triple(joint, inst.features);
  IbCorollary out;
  out.i_ty = mutual_information(triple.marginal_pair(1, 2));
  out.i_xy = mutual_information(joint);
  out.i_xt = mutual_information(triple.marginal_pair(0, 1));
  out.gap = std::abs(out.i_ty - out.i_xy);
  return out;
}

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

// Blue (early) to red (late).
std::string ramp(double u) {
  const int r = static_cast<int>(std::lround(40 + 200 * u));
  const int b = static_cast<int>(std::lround(220 - 180 * u));
  char buf[16];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", r, 60, b);
  return buf;
}

}  // namespace

std::string render_plane_svg(const Trajectory& traj) {
  if (traj.points.empty()) throw Error(ErrorKind::kInvalidArgument, "cannot plot an empty trajectory");
  constexpr double kW = 640, kH = 480, kPad = 60;

  double x_max = 0.0, y_max = 0.0;
  std::size_t e_min = traj.points.front().epoch, e_max = e_min;
  std::map<std::size_t, std::vector<const InfoPlanePoint*>> by_layer;
  for (const auto& p : traj.points) {
    x_max = std::max(x_max, p.i_xt);
    y_max = std::max(y_max, p.i_ty);
    e_min = std::min(e_min, p.epoch);
    e_max = std::max(e_max, p.epoch);
    by_layer[p.layer].push_back(&p);
  }
  x_max = x_max > 0.0 ? x_max * 1.05 : 1.0;
  y_max = y_max > 0.0 ? y_max * 1.05 : 1.0;
  auto sx = [&](double v) { return kPad + (kW - 2 * kPad) * v / x_max; };
  auto sy = [&](double v) { return kH - kPad - (kH - 2 * kPad) * v / y_max; };
  auto shade = [&](std::size_t e) {
    if (e_max == e_min) return ramp(0.0);
    return ramp(std::log1p(static_cast<double>(e - e_min)) / std::log1p(static_cast<double>(e_max - e_min)));
  };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW << "\" height=\"" << kH
      << "\" viewBox=\"0 0 " << kW << ' ' << kH << "\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<line x1=\"" << kPad << "\" y1=\"" << kH - kPad << "\" x2=\"" << kW - kPad << "\" y2=\""
      << kH - kPad << "\" stroke=\"black\"/>\n";
  svg << "<line x1=\"" << kPad << "\" y1=\"" << kPad << "\" x2=\"" << kPad << "\" y2=\"" << kH - kPad
      << "\" stroke=\"black\"/>\n";
  svg << "<text x=\"" << kW / 2 << "\" y=\"" << kH - 20 << "\" text-anchor=\"middle\" font-size=\"14\">I(X;T) [nats], max "
      << fmt(x_max) << "</text>\n";
  svg << "<text x=\"20\" y=\"" << kH / 2 << "\" text-anchor=\"middle\" font-size=\"14\" transform=\"rotate(-90 20 "
      << kH / 2 << ")\">I(T;Y) [nats], max " << fmt(y_max) << "</text>\n";

  for (const auto& [layer, pts] : by_layer) {
    svg << "<polyline class=\"layer\" data-layer=\"" << layer << "\" fill=\"none\" stroke=\"#888888\" points=\"";
    for (std::size_t k = 0; k < pts.size(); ++k) {
      svg << (k ? " " : "") << fmt(sx(pts[k]->i_xt)) << ',' << fmt(sy(pts[k]->i_ty));
    }
    svg << "\"/>\n";
  }
  for (const auto& [layer, pts] : by_layer) {
    for (const InfoPlanePoint* p : pts) {
      svg << "<circle class=\"marker\" data-layer=\"" << layer << "\" data-epoch=\"" << p->epoch << "\" cx=\""
          << fmt(sx(p->i_xt)) << "\" cy=\"" << fmt(sy(p->i_ty)) << "\" r=\"4\" fill=\"" << shade(p->epoch)
          << "\"/>\n";
    }
  }
  svg << "</svg>\n";
  return svg.str();
}

void emit_plane_svg(const Trajectory& traj, const std::filesystem::path& path) {
  const std::string doc = render_plane_svg(traj);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::kIoError, "cannot open " + path.string() + " for writing");
  out << doc;
  if (!out) throw Error(ErrorKind::kIoError, "failed writing " + path.string());
}

}  // namespace maxent
