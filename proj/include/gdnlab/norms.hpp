#pragma once

#include "gdnlab/grid.hpp"

namespace gdnlab {

// Trajectory snapshots on a common grid at strictly increasing times.
struct TimeSeriesField {
    std::vector<double> times;
    std::vector<Field> fields;

    void push(Field f);
    void validate() const;
};

// (sum |u|^p dx)^{1/p} by the rectangle rule; max |u| for p = infinity.
double lp_norm(const Field& f, double p);

// L^2 norm of J^s f (inhomogeneous) or D^s f (homogeneous).
double sobolev_norm(const Field& f, double s, SobolevKind kind);

// Lorentz quasi-norm on the piecewise-constant interpretation of the samples
// (each sample occupies a cell of width dx).  The decreasing rearrangement of
// such data is a step function, so the defining integral
//   ( int_0^inf (s^{1/p} f*(s))^q ds/s )^{1/q}
// is a finite closed-form sum; q = infinity takes sup_s s^{1/p} f*(s).
// Matches lp_norm exactly when q = p and gives (p/q)^{1/q} m^{1/p} on an
// indicator of measure m.
double lorentz_norm(const Field& f, double p, double q);

// L^q in time of the spatial L^p norm, trapezoid rule over the stored
// snapshot times; q = infinity takes the max over snapshots.
double mixed_norm(const TimeSeriesField& ts, double q, double p);

} // namespace gdnlab
