#include "asd/csv.hpp"

#include <ostream>

namespace asd {

void write_ode_csv(const OdeTrajectory& tr, const MeanField& mf, std::ostream& out) {
  const auto& labels = mf.statistics().labels().names();
  const auto& states = mf.kernel().states().names();
  out.precision(12);
  out << "t,kind,state,label,parent,value\n";
  for (std::size_t i = 0; i < tr.times.size(); ++i) {
    const auto& s = tr.states[i];
    for (std::size_t a = 0; a < mf.labels(); ++a) {
      for (std::size_t b = 0; b < mf.labels(); ++b) {
        if (!mf.active(a, b)) continue;
        for (std::size_t w = 0; w < mf.states(); ++w)
          out << tr.times[i] << ",zeta," << states[w] << ',' << labels[a] << ',' << labels[b] << ','
              << s.zeta(w, a, b) << '\n';
      }
      if (!mf.label_present(a)) continue;
      for (std::size_t w = 0; w < mf.states(); ++w)
        out << tr.times[i] << ",y," << states[w] << ',' << labels[a] << ",," << s.y(w, a) << '\n';
    }
  }
}

void write_stationary_csv(const StationaryReport& rep, const MeanField& mf, std::ostream& out) {
  const auto& labels = mf.statistics().labels().names();
  const auto& states = mf.kernel().states().names();
  out.precision(12);
  out << "id,classification,residual,max_real_eigenvalue";
  for (std::size_t a = 0; a < mf.labels(); ++a) {
    if (!mf.label_present(a)) continue;
    for (std::size_t w = 0; w < mf.states(); ++w) out << ",y[" << states[w] << '|' << labels[a] << ']';
  }
  for (std::size_t a = 0; a < mf.labels(); ++a)
    for (std::size_t b = 0; b < mf.labels(); ++b) {
      if (!mf.active(a, b)) continue;
      for (std::size_t w = 0; w < mf.states(); ++w)
        out << ",zeta[" << states[w] << '|' << labels[a] << ',' << labels[b] << ']';
    }
  out << '\n';
  for (std::size_t i = 0; i < rep.points.size(); ++i) {
    const auto& p = rep.points[i];
    out << i << ',' << p.classification << ',' << p.residual << ',' << p.max_real_eigenvalue;
    for (std::size_t a = 0; a < mf.labels(); ++a) {
      if (!mf.label_present(a)) continue;
      for (std::size_t w = 0; w < mf.states(); ++w) out << ',' << p.state.y(w, a);
    }
    for (std::size_t a = 0; a < mf.labels(); ++a)
      for (std::size_t b = 0; b < mf.labels(); ++b) {
        if (!mf.active(a, b)) continue;
        for (std::size_t w = 0; w < mf.states(); ++w) out << ',' << p.state.zeta(w, a, b);
      }
    out << '\n';
  }
}

void write_basins_csv(const BasinMap& map, std::ostream& out) {
  out << "ix,iy,x,y,label\n";
  const std::size_t cols = map.xs.size();
  for (std::size_t i = 0; i < map.label.size(); ++i) {
    std::size_t ix = i % cols, iy = i / cols;
    double y = map.ys.empty() ? 0.0 : map.ys[iy];
    out << ix << ',' << iy << ',' << map.xs[ix] << ',' << y << ',' << map.label[i] << '\n';
  }
}

}  // namespace asd
