#pragma once

#include <stdexcept>
#include <string>

namespace effmass {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The requested Bloch eigenvalue is not simple (or a Fredholm denominator vanishes).
class DegenerateBand : public Error {
 public:
  DegenerateBand(int band, double gap)
      : Error("band " + std::to_string(band) + " is not simple (gap " + std::to_string(gap) + ")"),
        band_(band),
        gap_(gap) {}
  int band() const noexcept { return band_; }
  double gap() const noexcept { return gap_; }

 private:
  int band_;
  double gap_;
};

class EigenSolverError : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

/// Box length is not an integer number of lattice cells of size eps.
class CommensurabilityError : public Error {
 public:
  using Error::Error;
};

class ResolutionError : public Error {
 public:
  using Error::Error;
};

class BlowUpDetected : public Error {
 public:
  BlowUpDetected(double t, double ratio)
      : Error("blow-up detected at t=" + std::to_string(t) + " (sup-norm ratio " + std::to_string(ratio) + ")"),
        time_(t),
        ratio_(ratio) {}
  double time() const noexcept { return time_; }
  double ratio() const noexcept { return ratio_; }

 private:
  double time_;
  double ratio_;
};

class GridMismatch : public Error {
 public:
  using Error::Error;
};

class DegenerateFit : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace effmass
