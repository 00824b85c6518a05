// Conductor of the cyclic cubic field Q[x]/(g): maximize the order Z[alpha]
// at every prime whose square divides disc(g), then read the conductor off
// the field discriminant, which is a perfect square f2^2 in the cyclic case.

#include <array>
#include <vector>

#include <gmpxx.h>

#include "cyclix/arith.hpp"
#include "cyclix/curve.hpp"
#include "cyclix/common.hpp"

namespace cyclix {

namespace {

using Vec3 = std::array<mpz_class, 3>;

struct OrderState {
    mpz_class den;               // basis rows / den in coords (1, a, a^2)
    std::array<Vec3, 3> basis;   // upper triangular after each step
};

// product in Q(alpha) with alpha^3 = -A alpha^2 - B alpha - C
Vec3 mul_coords(const Vec3& x, const Vec3& y, i64 A, i64 B, i64 C) {
    std::array<mpz_class, 5> c{};
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) c[i + j] += x[i] * y[j];
    }
    mpz_class a2b = mpz_class(A) * A - B;   // alpha^4 coefficients
    mpz_class abc = mpz_class(A) * B - C;
    mpz_class ac = mpz_class(A) * C;
    Vec3 r;
    r[0] = c[0] - mpz_class(C) * c[3] + ac * c[4];
    r[1] = c[1] - mpz_class(B) * c[3] + abc * c[4];
    r[2] = c[2] - mpz_class(A) * c[3] + a2b * c[4];
    return r;
}

// row HNF of a rank-3 integer lattice given by generating rows
std::array<Vec3, 3> hnf_rows(std::vector<Vec3> rows) {
    int pivot = 0;
    for (int col = 0; col < 3; ++col) {
        while (true) {
            int best = -1;
            for (int i = pivot; i < (int)rows.size(); ++i) {
                if (rows[i][col] != 0 &&
                    (best < 0 || cmp(abs(rows[i][col]), abs(rows[best][col])) < 0)) {
                    best = i;
                }
            }
            if (best < 0) break;
            std::swap(rows[pivot], rows[best]);
            bool clean = true;
            for (int i = pivot + 1; i < (int)rows.size(); ++i) {
                if (rows[i][col] == 0) continue;
                mpz_class q;
                mpz_fdiv_q(q.get_mpz_t(), rows[i][col].get_mpz_t(),
                           rows[pivot][col].get_mpz_t());
                for (int j = 0; j < 3; ++j) rows[i][j] -= q * rows[pivot][j];
                if (rows[i][col] != 0) clean = false;
            }
            if (clean) break;
        }
        check_internal(pivot < (int)rows.size() && rows[pivot][col] != 0,
                       "order lattice lost rank");
        if (rows[pivot][col] < 0) {
            for (int j = 0; j < 3; ++j) rows[pivot][j] = -rows[pivot][j];
        }
        ++pivot;
    }
    return {rows[0], rows[1], rows[2]};
}

// try to adjoin one element of (1/p) * current order; true if it grew
bool enlarge_at(OrderState& st, i64 p, i64 A, i64 B, i64 C) {
    mpz_class D = st.den * p;
    mpz_class D2 = D * D, D3 = D2 * D;
    auto integral = [&](const Vec3& u) {
        // multiplication-by-(u/D) matrix must have an integral
        // characteristic polynomial
        Vec3 col0 = u;
        Vec3 col1 = mul_coords(u, {0, 1, 0}, A, B, C);
        Vec3 col2 = mul_coords(u, {0, 0, 1}, A, B, C);
        mpz_class tr = col0[0] + col1[1] + col2[2];
        if (!mpz_divisible_p(tr.get_mpz_t(), D.get_mpz_t())) return false;
        mpz_class m2 = col0[0] * col1[1] - col1[0] * col0[1];
        m2 += col0[0] * col2[2] - col2[0] * col0[2];
        m2 += col1[1] * col2[2] - col2[1] * col1[2];
        if (!mpz_divisible_p(m2.get_mpz_t(), D2.get_mpz_t())) return false;
        mpz_class det = col0[0] * (col1[1] * col2[2] - col2[1] * col1[2]) -
                        col1[0] * (col0[1] * col2[2] - col2[1] * col0[2]) +
                        col2[0] * (col0[1] * col1[2] - col1[1] * col0[2]);
        return mpz_divisible_p(det.get_mpz_t(), D3.get_mpz_t()) != 0;
    };
    auto adjoin = [&](const Vec3& u) {
        std::vector<Vec3> rows;
        for (auto& b : st.basis) {
            rows.push_back({b[0] * p, b[1] * p, b[2] * p});
        }
        rows.push_back(u);
        st.basis = hnf_rows(std::move(rows));
        st.den = D;
        mpz_class g = st.den;
        for (auto& r : st.basis) {
            for (auto& x : r) g = gcd(g, x);
        }
        if (g > 1) {
            st.den /= g;
            for (auto& r : st.basis) {
                for (auto& x : r) x /= g;
            }
        }
    };
    auto combo = [&](i64 c0, i64 c1, i64 c2) {
        Vec3 u;
        for (int j = 0; j < 3; ++j) {
            u[j] = c0 * st.basis[0][j] + c1 * st.basis[1][j] + c2 * st.basis[2][j];
        }
        return u;
    };
    // one representative per line of P^2(F_p)
    for (i64 b = 0; b < p; ++b) {
        for (i64 a = 0; a < p; ++a) {
            Vec3 u = combo(1, b, a);
            if (integral(u)) { adjoin(u); return true; }
        }
    }
    for (i64 a = 0; a < p; ++a) {
        Vec3 u = combo(0, 1, a);
        if (integral(u)) { adjoin(u); return true; }
    }
    Vec3 u = combo(0, 0, 1);
    if (integral(u)) { adjoin(u); return true; }
    return false;
}

}  // namespace

i64 cubic_conductor_impl(const CurveModel& m) {
    i64 dg = disc_g(m);
    OrderState st;
    st.den = 1;
    st.basis = {Vec3{1, 0, 0}, Vec3{0, 1, 0}, Vec3{0, 0, 1}};
    for (auto& [p, e] : factorize(dg)) {
        if (e < 2) continue;
        if (p > 500) fail_unsupported("cubic_conductor: index prime too large");
        while (enlarge_at(st, p, m.A, m.B, m.C)) {}
    }
    mpz_class det = st.basis[0][0] * st.basis[1][1] * st.basis[2][2];
    mpz_class den3 = st.den * st.den * st.den;
    // disc(O) = disc(Z[alpha]) * (det / den^3)^2 and [Z[alpha] : O-index]
    // keeps this an exact integer
    mpz_class disc_o = dg * det * det;
    mpz_class den6 = den3 * den3;
    check_internal(mpz_divisible_p(disc_o.get_mpz_t(), den6.get_mpz_t()) != 0,
                   "cubic_conductor: non-integral field discriminant");
    disc_o /= den6;
    check_internal(mpz_perfect_square_p(disc_o.get_mpz_t()) != 0,
                   "cubic_conductor: field discriminant not a square");
    mpz_class f2z;
    mpz_sqrt(f2z.get_mpz_t(), disc_o.get_mpz_t());
    check_internal(f2z.fits_slong_p(), "cubic_conductor: conductor overflows");
    i64 f2 = (i64)f2z.get_si();
    // a cyclic cubic conductor is a product of distinct primes 1 mod 3,
    // optionally times 9
    for (auto& [q, e] : factorize(f2)) {
        if (q == 3) check_internal(e == 2, "cubic_conductor: bad 3-part");
        else check_internal(e == 1 && q % 3 == 1, "cubic_conductor: bad prime in conductor");
    }
    return f2;
}

}  // namespace cyclix
