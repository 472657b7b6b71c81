#pragma once

// Independent brute-force implementation of the classical recursion for
// counts N_d of degree-d rational plane curves through 3d-1 general points:
//
//   N_1 = 1
//   N_d = sum_{d1+d2=d, d1,d2>=1} N_{d1} N_{d2} *
//         ( d1^2 d2^2 binom(3d-4, 3d1-2) - d1^3 d2 binom(3d-4, 3d1-1) )
//
// Used only as a cross-check oracle for the WDVV engine. Deliberately avoids
// every header of the library under test; integers are raw cpp_int and the
// binomials come from a local Pascal triangle.

#include <boost/multiprecision/cpp_int.hpp>
#include <vector>

namespace oracle {

using Int = boost::multiprecision::cpp_int;

inline Int binom(int n, int k) {
    if (k < 0 || k > n) return 0;
    std::vector<Int> row(static_cast<std::size_t>(n) + 1, 0);
    row[0] = 1;
    for (int i = 1; i <= n; ++i)
        for (int j = i; j >= 1; --j)
            row[static_cast<std::size_t>(j)] += row[static_cast<std::size_t>(j) - 1];
    return row[static_cast<std::size_t>(k)];
}

// N_1..N_dmax, index 0 unused.
inline std::vector<Int> plane_curve_counts(int dmax) {
    std::vector<Int> n(static_cast<std::size_t>(dmax) + 1, 0);
    if (dmax >= 1) n[1] = 1;
    for (int d = 2; d <= dmax; ++d) {
        Int acc = 0;
        for (int d1 = 1; d1 < d; ++d1) {
            const int d2 = d - d1;
            Int a = Int(d1) * d1 * Int(d2) * d2 * binom(3 * d - 4, 3 * d1 - 2);
            Int b = Int(d1) * d1 * d1 * Int(d2) * binom(3 * d - 4, 3 * d1 - 1);
            acc += n[static_cast<std::size_t>(d1)] * n[static_cast<std::size_t>(d2)] * (a - b);
        }
        n[static_cast<std::size_t>(d)] = acc;
    }
    return n;
}

} // namespace oracle
