#include "entanglekit/kernels.hpp"

#include <cmath>
#include <functional>
#include <sstream>
#include <thread>
#include <vector>

namespace entanglekit {

const char* kernel_kind_name(KernelKind k) {
    switch (k) {
        case KernelKind::Amplitude: return "amplitude";
        case KernelKind::Poly: return "poly";
        case KernelKind::Rbf: return "rbf";
        case KernelKind::Sigmoid: return "sigmoid";
    }
    return "?";
}

KernelKind kernel_kind_from_name(const std::string& name) {
    if (name == "amplitude") return KernelKind::Amplitude;
    if (name == "poly") return KernelKind::Poly;
    if (name == "rbf") return KernelKind::Rbf;
    if (name == "sigmoid") return KernelKind::Sigmoid;
    throw ContractViolation("unknown kernel kind: " + name);
}

std::string KernelSpec::to_string() const {
    std::ostringstream os;
    os << kernel_kind_name(kind);
    if (kind == KernelKind::Poly) os << " degree=" << degree;
    if (kind != KernelKind::Amplitude) os << " gamma=" << gamma;
    return os.str();
}

double compensated_dot(const RVector& x, const RVector& y) {
    double sum = 0.0, comp = 0.0;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        const double term = x[i] * y[i];
        const double t = sum + term;
        if (std::abs(sum) >= std::abs(term))
            comp += (sum - t) + term;
        else
            comp += (term - t) + sum;
        sum = t;
    }
    return sum + comp;
}

namespace {

double compensated_sqdist(const RVector& x, const RVector& y) {
    double sum = 0.0, comp = 0.0;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        const double diff = x[i] - y[i];
        const double term = diff * diff;
        const double t = sum + term;
        if (sum >= term)
            comp += (sum - t) + term;
        else
            comp += (term - t) + sum;
        sum = t;
    }
    return sum + comp;
}

double eval_checked(const KernelSpec& spec, const RVector& x, const RVector& y) {
    switch (spec.kind) {
        case KernelKind::Amplitude: {
            const double nx = compensated_dot(x, x);
            const double ny = compensated_dot(y, y);
            if (nx == 0.0 || ny == 0.0)
                throw NormalizationError("amplitude kernel requires nonzero inputs");
            const double c = compensated_dot(x, y) / std::sqrt(nx * ny);
            return c * c;
        }
        case KernelKind::Poly:
            return spec.gamma * std::pow(compensated_dot(x, y), spec.degree);
        case KernelKind::Rbf:
            return std::exp(-spec.gamma * compensated_sqdist(x, y));
        case KernelKind::Sigmoid:
            return std::tanh(spec.gamma * compensated_dot(x, y));
    }
    throw ContractViolation("unreachable kernel kind");
}

void parallel_rows(Eigen::Index n, int jobs, const std::function<void(Eigen::Index)>& body) {
    jobs = std::max(1, jobs);
    if (jobs == 1) {
        for (Eigen::Index i = 0; i < n; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    std::vector<std::string> errors(static_cast<size_t>(jobs));
    for (int w = 0; w < jobs; ++w)
        pool.emplace_back([&, w] {
            try {
                for (Eigen::Index i = w; i < n; i += jobs) body(i);
            } catch (const std::exception& e) {
                errors[static_cast<size_t>(w)] = e.what();
            }
        });
    for (auto& t : pool) t.join();
    for (const auto& e : errors)
        if (!e.empty()) throw NormalizationError(e);
}

}  // namespace

double kernel_eval(const KernelSpec& spec, const RVector& x, const RVector& y) {
    spec.validate();
    if (x.size() != y.size()) throw DimensionError("kernel_eval: length mismatch");
    return eval_checked(spec, x, y);
}

RMatrix gram_matrix(const KernelSpec& spec, const RMatrix& x_rows, int jobs) {
    spec.validate();
    const Eigen::Index n = x_rows.rows();
    RMatrix g(n, n);
    parallel_rows(n, jobs, [&](Eigen::Index i) {
        const RVector xi = x_rows.row(i);
        for (Eigen::Index j = i; j < n; ++j)
            g(i, j) = eval_checked(spec, xi, x_rows.row(j));
    });
    // Mirror the upper triangle so symmetry is exact.
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < i; ++j) g(i, j) = g(j, i);
    return g;
}

RMatrix gram_matrix(const KernelSpec& spec, const RMatrix& x_rows, const RMatrix& y_rows,
                    int jobs) {
    spec.validate();
    if (x_rows.cols() != y_rows.cols()) throw DimensionError("gram_matrix: width mismatch");
    RMatrix g(x_rows.rows(), y_rows.rows());
    parallel_rows(x_rows.rows(), jobs, [&](Eigen::Index i) {
        const RVector xi = x_rows.row(i);
        for (Eigen::Index j = 0; j < y_rows.rows(); ++j)
            g(i, j) = eval_checked(spec, xi, y_rows.row(j));
    });
    return g;
}

}  // namespace entanglekit
