#include "dopri5.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "bioctl/errors.hpp"

namespace bioctl::detail {
namespace {

constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784,
                 a76 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;
constexpr double d1 = -12715105075.0 / 11282082432, d3 = 87487479700.0 / 32700410799,
                 d4 = -10690763975.0 / 1880347072, d5 = 701980252875.0 / 199316789632,
                 d6 = -1453857185.0 / 822651844, d7 = 69997945.0 / 29380423;

}  // namespace

State2 DenseStep::operator()(double t) const {
    const double th = (t - t_begin) / h;
    const double th1 = 1.0 - th;
    State2 y{};
    for (int i = 0; i < 2; ++i) {
        y[i] = coef[0][i] +
               th * (coef[1][i] + th1 * (coef[2][i] + th * (coef[3][i] + th1 * coef[4][i])));
    }
    return y;
}

Dopri5::Dopri5(Rhs2 rhs, StepperTolerances tol) : rhs_(std::move(rhs)), tol_(tol) {
    h_ = tol_.max_step;
}

DenseStep Dopri5::advance(double& t, State2& y, double t_limit) {
    if (!have_k1_) {
        k1_ = rhs_(t, y);
        have_k1_ = true;
    }
    const double min_h = 64.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(t));

    for (;;) {
        double h = std::min({h_, tol_.max_step, t_limit - t});
        const bool clipped = h < h_;
        if (h < min_h) {
            if (t_limit - t < min_h) {
                // Residual sliver at the end of a segment; absorb it.
                h = t_limit - t;
            } else {
                std::ostringstream os;
                os << "step size underflow at t = " << t << " (h = " << h << ")";
                throw IntegrationError(os.str());
            }
        }

        const State2& k1 = k1_;
        State2 tmp, k2, k3, k4, k5, k6, k7, y1;
        for (int i = 0; i < 2; ++i) tmp[i] = y[i] + h * a21 * k1[i];
        k2 = rhs_(t + c2 * h, tmp);
        for (int i = 0; i < 2; ++i) tmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
        k3 = rhs_(t + c3 * h, tmp);
        for (int i = 0; i < 2; ++i) tmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
        k4 = rhs_(t + c4 * h, tmp);
        for (int i = 0; i < 2; ++i)
            tmp[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
        k5 = rhs_(t + c5 * h, tmp);
        for (int i = 0; i < 2; ++i)
            tmp[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
        k6 = rhs_(t + h, tmp);
        for (int i = 0; i < 2; ++i)
            y1[i] = y[i] + h * (a71 * k1[i] + a73 * k3[i] + a74 * k4[i] + a75 * k5[i] + a76 * k6[i]);
        k7 = rhs_(t + h, y1);

        double err = 0.0;
        for (int i = 0; i < 2; ++i) {
            const double ei =
                h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
            const double sc = tol_.atol + tol_.rtol * std::max(std::abs(y[i]), std::abs(y1[i]));
            err += (ei / sc) * (ei / sc);
        }
        err = std::sqrt(err / 2.0);
        if (!std::isfinite(err)) err = 1e10;

        const double fac = err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
        if (err <= 1.0) {
            DenseStep ds;
            ds.t_begin = t;
            ds.h = h;
            for (int i = 0; i < 2; ++i) {
                const double ydiff = y1[i] - y[i];
                const double bspl = h * k1[i] - ydiff;
                ds.coef[0][i] = y[i];
                ds.coef[1][i] = ydiff;
                ds.coef[2][i] = bspl;
                ds.coef[3][i] = ydiff - h * k7[i] - bspl;
                ds.coef[4][i] = h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] +
                                     d6 * k6[i] + d7 * k7[i]);
            }
            t = (h == t_limit - t) ? t_limit : t + h;
            y = y1;
            k1_ = k7;
            // A step clipped by the segment end says nothing about the
            // admissible size; keep the previous proposal.
            if (!clipped) h_ = std::min(h * fac, tol_.max_step);
            return ds;
        }
        h_ = h * std::max(fac, 0.1);
    }
}

}  // namespace bioctl::detail
