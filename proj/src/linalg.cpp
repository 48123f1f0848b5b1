#include "ldp/linalg.hpp"

#include <algorithm>
#include <cmath>

#include "ldp/math.hpp"

namespace ldp {

double spd_log_det(std::span<double> a, int n) {
    // In-place lower Cholesky; accumulate 2*sum(log(L_ii)).
    double log_det = 0.0;
    for (int j = 0; j < n; ++j) {
        double d = a[std::size_t(j) * n + j];
        for (int k = 0; k < j; ++k) d -= a[std::size_t(j) * n + k] * a[std::size_t(j) * n + k];
        if (!(d > 0.0)) throw numeric_error("spd_log_det: matrix is not positive definite");
        const double l = std::sqrt(d);
        a[std::size_t(j) * n + j] = l;
        log_det += 2.0 * std::log(l);
        for (int i = j + 1; i < n; ++i) {
            double s = a[std::size_t(i) * n + j];
            for (int k = 0; k < j; ++k) s -= a[std::size_t(i) * n + k] * a[std::size_t(j) * n + k];
            a[std::size_t(i) * n + j] = s / l;
        }
    }
    return log_det;
}

int qr_rank(std::vector<double> a, int rows, int cols, double rel_tol) {
    std::vector<int> perm(cols);
    for (int j = 0; j < cols; ++j) perm[j] = j;
    std::vector<double> col_norm(cols);
    auto norm_tail = [&](int j, int from) {
        double s = 0.0;
        for (int i = from; i < rows; ++i) {
            const double v = a[std::size_t(i) * cols + j];
            s += v * v;
        }
        return s;
    };
    for (int j = 0; j < cols; ++j) col_norm[j] = norm_tail(j, 0);

    const int kmax = std::min(rows, cols);
    double first_pivot = 0.0;
    int rank = 0;
    for (int k = 0; k < kmax; ++k) {
        // Pivot on the column with the largest remaining norm.
        int p = k;
        for (int j = k + 1; j < cols; ++j)
            if (col_norm[j] > col_norm[p]) p = j;
        if (p != k) {
            for (int i = 0; i < rows; ++i)
                std::swap(a[std::size_t(i) * cols + k], a[std::size_t(i) * cols + p]);
            std::swap(col_norm[k], col_norm[p]);
            std::swap(perm[k], perm[p]);
        }
        const double pivot = std::sqrt(norm_tail(k, k));
        if (k == 0) first_pivot = pivot;
        if (!(pivot > rel_tol * first_pivot)) break;
        ++rank;

        // Householder reflector for column k.
        double alpha = -std::copysign(pivot, a[std::size_t(k) * cols + k]);
        std::vector<double> v(rows - k);
        for (int i = k; i < rows; ++i) v[i - k] = a[std::size_t(i) * cols + k];
        v[0] -= alpha;
        double vnorm2 = 0.0;
        for (double x : v) vnorm2 += x * x;
        if (vnorm2 > 0.0) {
            for (int j = k; j < cols; ++j) {
                double dot = 0.0;
                for (int i = k; i < rows; ++i) dot += v[i - k] * a[std::size_t(i) * cols + j];
                const double scale = 2.0 * dot / vnorm2;
                for (int i = k; i < rows; ++i) a[std::size_t(i) * cols + j] -= scale * v[i - k];
            }
        }
        a[std::size_t(k) * cols + k] = alpha;
        for (int j = k + 1; j < cols; ++j) col_norm[j] = norm_tail(j, k + 1);
    }
    return rank;
}

}  // namespace ldp
