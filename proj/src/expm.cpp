#include "kconv/expm.hpp"

#include "kconv/errors.hpp"

#include <array>
#include <cmath>

namespace kconv {

namespace {

constexpr double kTheta13 = 5.371920351148152;

struct PadeDegree {
    int degree;
    double theta;
};
constexpr std::array<PadeDegree, 4> kLowDegrees{{
    {3, 1.495585217958292e-2},
    {5, 2.539398330063230e-1},
    {7, 9.504178996162932e-1},
    {9, 2.097847961257068e0},
}};

constexpr std::array<double, 4> kB3{120.0, 60.0, 12.0, 1.0};
constexpr std::array<double, 6> kB5{30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0};
constexpr std::array<double, 8> kB7{17297280.0, 8648640.0, 1995840.0, 277200.0,
                                    25200.0,    1512.0,    56.0,      1.0};
constexpr std::array<double, 10> kB9{17643225600.0, 8821612800.0, 2075673600.0, 302702400.0, 30270240.0,
                                     2162160.0,     110880.0,     3960.0,       90.0,        1.0};
constexpr std::array<double, 14> kB13{64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
                                      1187353796428800.0,  129060195264000.0,   10559470521600.0,
                                      670442572800.0,      33522128640.0,       1323241920.0,
                                      40840800.0,          960960.0,            16380.0,
                                      182.0,               1.0};

double one_norm(const DenseMatrix& a) { return a.cwiseAbs().colwise().sum().maxCoeff(); }

DenseMatrix solve_pade(const DenseMatrix& u, const DenseMatrix& v) {
    const DenseMatrix p = v + u;
    const DenseMatrix q = v - u;
    Eigen::PartialPivLU<DenseMatrix> lu(q);
    DenseMatrix r = lu.solve(p);
    if (!r.allFinite()) throw NumericError("expm: Pade denominator is singular");
    return r;
}

template <std::size_t K>
DenseMatrix pade_low(const DenseMatrix& a, const std::array<double, K>& b) {
    const auto n = a.rows();
    const DenseMatrix ident = DenseMatrix::Identity(n, n);
    const DenseMatrix a2 = a * a;
    DenseMatrix power = ident;
    DenseMatrix odd = DenseMatrix::Zero(n, n);
    DenseMatrix even = DenseMatrix::Zero(n, n);
    for (std::size_t k = 0; k < K; k += 2) {
        even += b[k] * power;
        odd += b[k + 1] * power;
        if (k + 2 < K) power = power * a2;
    }
    return solve_pade(a * odd, even);
}

DenseMatrix pade13(const DenseMatrix& a) {
    const auto n = a.rows();
    const DenseMatrix ident = DenseMatrix::Identity(n, n);
    const DenseMatrix a2 = a * a;
    const DenseMatrix a4 = a2 * a2;
    const DenseMatrix a6 = a4 * a2;
    const auto& b = kB13;
    const DenseMatrix u_inner = a6 * (b[13] * a6 + b[11] * a4 + b[9] * a2) + b[7] * a6 + b[5] * a4 +
                                b[3] * a2 + b[1] * ident;
    const DenseMatrix u = a * u_inner;
    const DenseMatrix v = a6 * (b[12] * a6 + b[10] * a4 + b[8] * a2) + b[6] * a6 + b[4] * a4 +
                          b[2] * a2 + b[0] * ident;
    return solve_pade(u, v);
}

}  // namespace

int expm_squarings(double norm) {
    if (!(norm > kTheta13)) return 0;
    return static_cast<int>(std::ceil(std::log2(norm / kTheta13)));
}

DenseMatrix expm(const DenseMatrix& a) {
    if (a.rows() != a.cols()) throw ConfigError("expm: matrix must be square");
    if (!a.allFinite()) throw NumericError("expm: non-finite input");
    const auto n = a.rows();
    if (n == 0) return a;

    const double shift = a.diagonal().cwiseAbs().maxCoeff();
    DenseMatrix b = a;
    b.diagonal().array() += shift;
    const double norm = one_norm(b);

    DenseMatrix r;
    int squarings = 0;
    bool done = false;
    for (const auto& [degree, theta] : kLowDegrees) {
        if (norm <= theta) {
            switch (degree) {
                case 3: r = pade_low(b, kB3); break;
                case 5: r = pade_low(b, kB5); break;
                case 7: r = pade_low(b, kB7); break;
                default: r = pade_low(b, kB9); break;
            }
            done = true;
            break;
        }
    }
    if (!done) {
        squarings = expm_squarings(norm);
        if (squarings > 1000) throw NumericError("expm: norm too large to scale");
        const DenseMatrix scaled = b * std::ldexp(1.0, -squarings);
        r = pade13(scaled);
    }
    r *= std::exp(-std::ldexp(shift, -squarings));
    for (int s = 0; s < squarings; ++s) r = r * r;
    if (!r.allFinite()) throw NumericError("expm: result is not finite");
    return r;
}

DenseMatrix matrix_power(const DenseMatrix& a, long long n) {
    if (n < 0) throw ConfigError("matrix_power: negative exponent");
    DenseMatrix result = DenseMatrix::Identity(a.rows(), a.cols());
    DenseMatrix base = a;
    bool first = true;
    while (n > 0) {
        if (n & 1) {
            if (first) {
                result = base;
                first = false;
            } else {
                result = result * base;
            }
        }
        n >>= 1;
        if (n > 0) base = base * base;
    }
    return result;
}

}  // namespace kconv
