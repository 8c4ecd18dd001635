#pragma once

#include <iosfwd>

#include "asd/meanfield.hpp"

namespace asd {

// Long format: t,kind,state,label,parent,value (kind is zeta or y; parent empty for y).
void write_ode_csv(const OdeTrajectory& tr, const MeanField& mf, std::ostream& out);
// One row per fixed point: id,classification,residual,max_real_eigenvalue, then y and active zeta columns.
void write_stationary_csv(const StationaryReport& rep, const MeanField& mf, std::ostream& out);
// ix,iy,x,y,label (label -1 undecided, -2 outside the simplex).
void write_basins_csv(const BasinMap& map, std::ostream& out);

}  // namespace asd
