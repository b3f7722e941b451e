#include "odeforge/guess.hpp"

#include <algorithm>
#include <numeric>

namespace odeforge {

long budget(long order, long degree, long n_bases, long rhs_degree) {
    return (order + 1) * (degree + 1) + n_bases * (rhs_degree + 1);
}

namespace {

struct System {
    FpMatrix m;
    std::vector<int> col_degree;
};

// Rows are the coefficients of w^n, n = offset .. offset+rows-1, of
// L(s) - sum_t Q_t B_t.
System build_system(const PrimeSeries& s, int M, int D, const RhsAnsatz* rhs, std::size_t rows) {
    const auto& F = s.field;
    std::size_t nop = std::size_t(M + 1) * (D + 1);
    std::size_t nb = rhs ? rhs->bases.size() : 0;
    int Dr = rhs ? rhs->rhs_degree : 0;
    std::size_t ncols = nop + nb * (Dr + 1);
    System sys{FpMatrix(rows, ncols), std::vector<int>(ncols)};
    for (int i = 0; i <= M; ++i)
        for (int j = 0; j <= D; ++j) sys.col_degree[i * (D + 1) + j] = j;
    for (std::size_t t = 0; t < nb; ++t)
        for (int k = 0; k <= Dr; ++k) sys.col_degree[nop + t * (Dr + 1) + k] = k;

    for (std::size_t r = 0; r < rows; ++r) {
        long n = s.offset + long(r);
        for (int j = 0; j <= D; ++j) {
            long idx = n - j;
            u32 c = idx < s.offset ? 0 : s.at(idx);
            if (!c) continue;
            u32 base = F.from_int(idx), pw = 1;
            for (int i = 0; i <= M; ++i) {
                sys.m(r, i * (D + 1) + j) = F.mul(pw, c);
                pw = F.mul(pw, base);
            }
        }
        for (std::size_t t = 0; t < nb; ++t) {
            const auto& B = rhs->bases[t].series;
            for (int k = 0; k <= Dr; ++k) {
                long idx = n - k;
                u32 b = (idx < B.offset) ? 0 : B.at(idx);
                sys.m(r, nop + t * (Dr + 1) + k) = F.neg(b);
            }
        }
    }
    return sys;
}

// Element of the span with the smallest maximal column degree.
std::vector<u32> min_degree_vector(const std::vector<std::vector<u32>>& kernel, const std::vector<int>& deg,
                                   const PrimeField& F) {
    std::size_t n = deg.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return deg[a] > deg[b]; });
    std::vector<std::vector<u32>> rows = kernel;
    std::size_t r = 0;
    for (std::size_t pos = 0; pos < n && r < rows.size(); ++pos) {
        std::size_t c = order[pos];
        std::size_t piv = r;
        while (piv < rows.size() && rows[piv][c] == 0) ++piv;
        if (piv == rows.size()) continue;
        std::swap(rows[piv], rows[r]);
        u32 s = F.inv(rows[r][c]);
        for (auto& x : rows[r]) x = F.mul(x, s);
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (i == r || rows[i][c] == 0) continue;
            u32 t = F.neg(rows[i][c]);
            for (std::size_t j = 0; j < n; ++j) rows[i][j] = F.add(rows[i][j], F.mul(t, rows[r][j]));
        }
        ++r;
    }
    return rows[r - 1];
}

ThetaOpP op_from_vector(const std::vector<u32>& v, int M, int D, const PrimeField& F) {
    std::vector<Poly<Zp>> rows(M + 1);
    for (int i = 0; i <= M; ++i)
        for (int j = 0; j <= D; ++j) rows[i].push_back(Zp(v[i * (D + 1) + j], F.p()));
    return ThetaOpP(std::move(rows), Zp(1, F.p()));
}

struct Attempt {
    bool found = false;
    FitReport report;
};

Attempt try_fit(const PrimeSeries& s, int M, int D, const RhsAnsatz* rhs, int margin) {
    const auto& F = s.field;
    std::size_t N = s.size();
    long unknowns = budget(M, D, rhs ? long(rhs->bases.size()) : 0, rhs ? rhs->rhs_degree : 0);
    System full = build_system(s, M, D, rhs, N);
    if (long(full.m.cols) != unknowns) throw std::logic_error("fitting matrix width differs from budget");
    auto kernel = nullspace(full.m, F);
    Attempt a;
    if (kernel.empty()) return a;
    // the kernel must already be stable before the last half of the margin
    std::size_t fewer = N - std::size_t((margin + 1) / 2);
    FpMatrix part(fewer, full.m.cols);
    std::copy(full.m.entries.begin(), full.m.entries.begin() + fewer * full.m.cols, part.entries.begin());
    if (full.m.cols - rank(part, F) != kernel.size()) return a;

    auto v = min_degree_vector(kernel, full.col_degree, F);
    std::size_t nop = std::size_t(M + 1) * (D + 1);
    std::vector<u32> opv(v.begin(), v.begin() + nop);
    ThetaOpP op = op_from_vector(opv, M, D, F);
    a.found = true;
    a.report.kernel_dim = int(kernel.size());
    a.report.unknowns = unknowns;
    a.report.equations_used = long(N);
    a.report.scanned_order = M;
    a.report.scanned_degree = D;
    if (op.is_zero()) {
        a.report.op = op;
        return a;
    }
    // scale so the first nonzero operator coefficient in (i, j) order is 1
    u32 lead = 0;
    for (auto x : opv)
        if (x) {
            lead = x;
            break;
        }
    u32 inv = F.inv(lead);
    for (auto& x : v) x = F.mul(x, inv);
    opv.assign(v.begin(), v.begin() + nop);
    a.report.op = op_from_vector(opv, M, D, F);
    if (rhs) {
        int Dr = rhs->rhs_degree;
        for (std::size_t t = 0; t < rhs->bases.size(); ++t) {
            std::vector<u32> q(v.begin() + nop + t * (Dr + 1), v.begin() + nop + (t + 1) * (Dr + 1));
            a.report.rhs_polys.push_back(q);
        }
    }
    return a;
}

int largest_degree(long len, int M, const RhsAnsatz* rhs, int margin, int max_degree) {
    long nb = rhs ? long(rhs->bases.size()) : 0, Dr = rhs ? rhs->rhs_degree : 0;
    long avail = len - margin - nb * (Dr + 1);
    if (avail < M + 1) return -1;
    return int(std::min<long>(max_degree, avail / (M + 1) - 1));
}

}  // namespace

std::vector<u32> residual(const ThetaOpP& op, const PrimeSeries& s) {
    std::vector<Zp> c(std::size_t(s.end()), Zp(0, s.field.p()));
    for (long n = s.offset; n < s.end(); ++n) c[n] = Zp(s.at(n), s.field.p());
    auto r = apply_coeffs(op, c, Zp(0, s.field.p()), std::size_t(std::max(0L, s.offset)), s.size());
    std::vector<u32> out;
    for (auto& x : r) out.push_back(x.v);
    return out;
}

FitReport guess_ode(const PrimeSeries& s, int max_order, int max_degree, const GuessOptions& opt) {
    if (largest_degree(long(s.size()), opt.min_order, nullptr, opt.margin, max_degree) < 0)
        throw InsufficientTerms("series of " + std::to_string(s.size()) + " terms is too short to fit order " +
                                std::to_string(opt.min_order));
    for (int M = opt.min_order; M <= max_order; ++M) {
        int D = largest_degree(long(s.size()), M, nullptr, opt.margin, max_degree);
        if (D < 0) break;
        auto a = try_fit(s, M, D, nullptr, opt.margin);
        if (a.found && !a.report.op.is_zero()) return a.report;
    }
    throw NoAnnihilatorFound();
}

FitReport guess_inhom(const PrimeSeries& s, int max_order, int max_degree, const RhsAnsatz& rhs, GuessOptions opt) {
    if (rhs.bases.empty()) throw NoSolutionFound("right-hand side ansatz has no bases");
    for (const auto& b : rhs.bases)
        if (b.series.field != s.field || b.series.var != s.var || b.series.end() < s.end())
            throw FieldMismatch("basis " + b.label + " does not match the series");
    if (largest_degree(long(s.size()), opt.min_order, &rhs, opt.margin, max_degree) < 0)
        throw InsufficientTerms();
    for (int M = opt.min_order; M <= max_order; ++M) {
        int D = largest_degree(long(s.size()), M, &rhs, opt.margin, max_degree);
        if (D < 0) break;
        auto a = try_fit(s, M, D, &rhs, opt.margin);
        if (!a.found) continue;
        const auto& op = a.report.op;
        if (op.is_zero() || op.order() == 0)
            throw DegenerateFit("fitted relation has no differential part: the series lies in the span of the bases");
        // verify L(s) - sum Q_t B_t vanishes through every available term
        const auto& F = s.field;
        auto res = residual(op, s);
        for (std::size_t r = 0; r < res.size(); ++r) {
            long n = s.offset + long(r);
            u32 acc = res[r];
            for (std::size_t t = 0; t < rhs.bases.size(); ++t)
                for (int k = 0; k <= rhs.rhs_degree; ++k) {
                    long idx = n - k;
                    const auto& B = rhs.bases[t].series;
                    if (idx < B.offset) continue;
                    acc = F.sub(acc, F.mul(a.report.rhs_polys[t][k], B.at(idx)));
                }
            if (acc) throw NoSolutionFound("fitted relation fails at w^" + std::to_string(n));
        }
        return a.report;
    }
    throw NoSolutionFound();
}

PrimeSeries extend_series(const ThetaOpP& op, const PrimeSeries& seed, const std::optional<PrimeSeries>& rhs,
                          long target_len) {
    if (seed.coeffs.empty()) throw SeedTooShort();
    if (op.is_zero()) throw NoAnnihilatorFound("zero operator");
    const auto& F = seed.field;
    if (op.one.p != F.p()) throw FieldMismatch();
    int D = op.degree();
    int j0 = D;
    for (const auto& r : op.rows)
        if (!r.empty()) j0 = std::min(j0, poly::low_order(r));
    auto P = [&](int j, long t) {
        u32 x = F.from_int(t), h = 0;
        for (std::size_t i = op.rows.size(); i-- > 0;) h = F.add(F.mul(h, x), op.coeff(int(i), j).v);
        return h;
    };
    long start = seed.offset;
    long end = start + target_len;
    std::vector<u32> c(seed.coeffs.begin(), seed.coeffs.end());
    if (long(c.size()) > target_len) c.resize(std::size_t(std::max(0L, target_len)));
    for (long n = seed.end(); n < end; ++n) {
        long m = n + j0;  // equation that determines c_n
        u32 e = 0;
        if (rhs) {
            if (m >= rhs->end()) throw InsufficientTerms("right-hand side too short at w^" + std::to_string(m));
            e = m < rhs->offset ? 0 : rhs->at(m);
        }
        u64 acc = e;
        for (int j = j0 + 1; j <= D; ++j) {
            long idx = m - j;
            if (idx < start) continue;
            u32 cj = c[std::size_t(idx - start)];
            if (cj) acc = (acc + u64(F.neg(P(j, idx))) * cj) % F.p();
        }
        u32 a = P(j0, n);
        if (a == 0) throw IndicialObstruction(n);
        c.push_back(F.div(u32(acc), a));
    }
    return PrimeSeries(F, std::move(c), start, seed.var);
}

PrimeSeries elliptic_k_series(const PrimeField& F, std::size_t len) {
    std::vector<u32> c(len, 0);
    u32 k = 1;
    for (std::size_t n = 0; 2 * n < len; ++n) {
        if (n > 0) {
            u32 r = F.mul(F.from_int(2 * (2 * long(n) - 1)), F.inv(F.from_int(long(n))));
            k = F.mul(k, F.mul(r, r));
        }
        c[2 * n] = k;
    }
    return PrimeSeries(F, std::move(c), 0);
}

PrimeSeries elliptic_e_series(const PrimeField& F, std::size_t len) {
    std::vector<u32> c(len, 0);
    u32 e = 1;
    for (std::size_t n = 0; 2 * n < len; ++n) {
        if (n > 0) {
            long m = long(n);
            u32 num = F.from_int(4 * (2 * m - 1) * (2 * m - 3));
            e = F.mul(e, F.mul(num, F.inv(F.mul(F.from_int(m), F.from_int(m)))));
        }
        c[2 * n] = e;
    }
    return PrimeSeries(F, std::move(c), 0);
}

namespace {

PrimeSeries poly_series(const PrimeField& F, const std::vector<long>& coeffs, std::size_t len) {
    std::vector<u32> c(len, 0);
    for (std::size_t i = 0; i < coeffs.size() && i < len; ++i) c[i] = F.from_int(coeffs[i]);
    return PrimeSeries(F, std::move(c), 0);
}

PrimeSeries series_pow(const PrimeSeries& a, int e, std::size_t len) {
    PrimeSeries r = poly_series(a.field, {1}, len);
    for (int i = 0; i < e; ++i) r = series_mul(r, a);
    return r;
}

}  // namespace

RhsAnsatz elliptic_basis(const PrimeField& F, std::size_t len, int kappa, int rhs_degree) {
    if (len / 2 >= F.p()) throw InsufficientTerms("elliptic series longer than 2p");
    PrimeSeries K = elliptic_k_series(F, len), E = elliptic_e_series(F, len);
    PrimeSeries one_m16 = poly_series(F, {1, 0, -16}, len);
    PrimeSeries den = series_recip(series_pow(poly_series(F, {1, 4}, len), 6, len));
    RhsAnsatz out;
    out.rhs_degree = rhs_degree;
    for (int t = 0; t <= 4; ++t) {
        PrimeSeries s = series_mul(series_pow(K, 4 - t, len), series_pow(E, t, len));
        int e = 3 - t - kappa;
        PrimeSeries f = series_pow(one_m16, std::abs(e), len);
        s = series_mul(s, e >= 0 ? f : series_recip(f));
        s = series_mul(s, den);
        // multiply by w: shift the offset and drop the last term to keep the
        // common end at len
        std::vector<u32> c(s.coeffs.begin(), s.coeffs.end() - 1);
        out.bases.push_back({"t=" + std::to_string(t), PrimeSeries(F, std::move(c), 1)});
    }
    return out;
}

}  // namespace odeforge
