#pragma once

#include <complex>
#include <sstream>
#include <stdexcept>
#include <string>

namespace decim {

/// Base class for every failure of a numerical routine (as opposed to bad input).
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {
inline std::string format_omega(std::complex<double> w)
{
    std::ostringstream os;
    os.precision(17);
    os << w.real() << (w.imag() < 0 ? "-" : "+") << std::abs(w.imag()) << "i";
    return os.str();
}
}  // namespace detail

/// (omega - D) is numerically singular: omega sits on an eigenvalue.
class SingularResolvent : public NumericalError {
public:
    explicit SingularResolvent(std::complex<double> omega)
        : NumericalError("resolvent is singular at omega = " + detail::format_omega(omega)), omega_(omega)
    {
    }
    std::complex<double> omega() const noexcept { return omega_; }

private:
    std::complex<double> omega_;
};

/// A decimation step divided by omega - eps1 == 0.
class DecimationPole : public NumericalError {
public:
    DecimationPole(int step, std::complex<double> omega)
        : NumericalError("decimation pole at step " + std::to_string(step) +
                         ", omega = " + detail::format_omega(omega)),
          step_(step), omega_(omega)
    {
    }
    int step() const noexcept { return step_; }
    std::complex<double> omega() const noexcept { return omega_; }

private:
    int step_;
    std::complex<double> omega_;
};

class EigenSolverFailure : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// Row recovery needs a nonzero hopping in the recovery direction.
class UnidirectionalChain : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// A root/branch choice produced an unphysical value (e.g. negative DOS).
class BranchError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// |z±| = 1 within the exclusion band: omega sits on a phase boundary.
class GapClosing : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class BesselDomainError : public std::out_of_range {
public:
    using std::out_of_range::out_of_range;
};

}  // namespace decim
