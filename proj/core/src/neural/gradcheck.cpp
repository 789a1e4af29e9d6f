#include "hrrpnet/neural/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

#include "hrrpnet/neural/models.hpp"

namespace hrrpnet::neural {

double gradcheck_tolerance(bool f64) { return f64 ? 1e-6 : 1e-3; }

double gradcheck_rel_error(double analytic, double numeric, double floor) {
    const double denom = std::max({std::abs(analytic), std::abs(numeric), floor, 1e-300});
    return std::abs(analytic - numeric) / denom;
}

namespace {


// Uniform wrapper so that parameter-free layers, modules with a collect() and
// the full network can be driven by the same checker.
template <typename T>
struct Probe {
    std::function<Tensor<T>(const Tensor<T>&)> forward;
    std::function<Tensor<T>(const Tensor<T>&)> backward;  // given dLoss/dOut
    std::function<std::vector<NamedTensor<T>>()> params;
};

template <typename M, typename T>
Probe<T> make_probe(M& m) {
    Probe<T> p;
    p.forward = [&m](const Tensor<T>& x) { return m.forward(x); };
    p.backward = [&m](const Tensor<T>& dy) { return m.backward(dy); };
    p.params = [&m]() {
        std::vector<NamedTensor<T>> v;
        if constexpr (requires { m.collect(v, std::string()); }) m.collect(v, "");
        return v;
    };
    return p;
}

Tensor<double> random_tensor(const Shape& s, numerics::Prng& prng, double scale) {
    Tensor<double> t(s);
    for (auto& v : t.data) v = scale * prng.normal();
    return t;
}

template <typename T>
Tensor<T> cast(const Tensor<double>& x) {
    Tensor<T> y(x.shape);
    for (std::size_t i = 0; i < x.size(); ++i) y.data[i] = static_cast<T>(x.data[i]);
    return y;
}

template <typename T>
Tensor<double> widen(const Tensor<T>& x) {
    Tensor<double> y(x.shape);
    for (std::size_t i = 0; i < x.size(); ++i) y.data[i] = static_cast<double>(x.data[i]);
    return y;
}

// Loss used for plain modules: a fixed random projection of the output.
struct Projection {
    Tensor<double> r;
    double operator()(const Tensor<double>& y) const {
        double s = 0.0;
        for (std::size_t i = 0; i < y.size(); ++i) s += r.data[i] * y.data[i];
        return s;
    }
};

std::vector<std::size_t> pick(std::size_t n, std::size_t k, numerics::Prng& prng) {
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    if (n <= k) return idx;
    for (std::size_t i = 0; i < k; ++i) std::swap(idx[i], idx[i + prng.below(n - i)]);
    idx.resize(k);
    return idx;
}

/// `analytic` is the module under test (float or double); `reference` is a
/// double twin with identical parameter values, used for finite differences.
/// `loss_grad` returns dLoss/dOut (for the analytic backward pass);
/// `loss` evaluates the scalar loss in double.
template <typename T>
void check(const std::string& name, Probe<T> analytic, Probe<double> reference, const Tensor<double>& input,
           const std::function<double(const Tensor<double>&)>& loss,
           const std::function<Tensor<double>(const Tensor<double>&)>& loss_grad, const GradcheckOptions& opts,
           std::vector<GradcheckResult>& out) {
    numerics::Prng prng(opts.seed, std::hash<std::string>{}(name) & 0xFFFFFFFFu);
    const double tol = gradcheck_tolerance(opts.f64);

    // Align the reference parameters with the (possibly rounded) analytic ones.
    auto pa = analytic.params();
    auto pr = reference.params();
    for (std::size_t i = 0; i < pa.size(); ++i) {
        for (std::size_t k = 0; k < pa[i].tensor->size(); ++k) {
            pr[i].tensor->data[k] = static_cast<double>(pa[i].tensor->data[k]);
        }
        pa[i].tensor->zero_grad();
    }
    const Tensor<T> xa = cast<T>(input);
    const Tensor<double> x0 = widen(xa);

    const auto ya = analytic.forward(xa);
    const auto dy = cast<T>(loss_grad(widen(ya)));
    const auto dx = analytic.backward(dy);

    // Entries far below the largest gradient in the check sit at the level of
    // finite-difference noise, so the relative error floor scales with it.
    double global_scale = 0.0;
    for (auto g : dx.data) global_scale = std::max(global_scale, std::abs(static_cast<double>(g)));
    for (const auto& p : pa) {
        if (!p.trainable) continue;
        for (auto g : p.tensor->grad) global_scale = std::max(global_scale, std::abs(static_cast<double>(g)));
    }

    auto run_fd = [&](const std::string& label, AlignedVector<double>& values, const AlignedVector<T>& grads,
                      bool is_input) {
        GradcheckResult res{name + "/" + label, 0, 0.0, tol};
        const auto idx = pick(values.size(), opts.samples_per_tensor, prng);
        std::vector<double> numeric;
        auto eval_at = [&](std::size_t i, double v) {
            const double orig = values[i];
            values[i] = v;
            const double l = loss(reference.forward(is_input ? Tensor<double>(x0.shape, std::vector<double>(values.begin(), values.end())) : x0));
            values[i] = orig;
            return l;
        };
        for (auto i : idx) {
            const double orig = values[i];
            double h = opts.step * std::max(1.0, std::abs(orig));
            double estimate = 0.0;
            // A step that straddles a ReLU or max-pool switch makes the central
            // difference depend on h; shrink until two step sizes agree.
            for (int attempt = 0; attempt < 5; ++attempt, h /= 10.0) {
                const double c1 = (eval_at(i, orig + h) - eval_at(i, orig - h)) / (2.0 * h);
                const double c2 = (eval_at(i, orig + h / 2) - eval_at(i, orig - h / 2)) / h;
                estimate = c2;
                if (std::abs(c1 - c2) <= 1e-4 * std::abs(c2) + 1e-7) break;
            }
            numeric.push_back(estimate);
        }
        double scale = global_scale;
        for (auto v : numeric) scale = std::max(scale, std::abs(v));
        for (std::size_t j = 0; j < idx.size(); ++j) {
            const double e = gradcheck_rel_error(static_cast<double>(grads[idx[j]]), numeric[j], 1e-2 * scale);
            res.max_rel_error = std::max(res.max_rel_error, e);
            ++res.checked;
        }
        out.push_back(res);
    };

    AlignedVector<double> xin = x0.data;
    run_fd("input", xin, dx.data, true);
    for (std::size_t i = 0; i < pa.size(); ++i) {
        if (!pa[i].trainable) continue;
        run_fd(pa[i].name.empty() ? "param" : pa[i].name, pr[i].tensor->data, pa[i].tensor->grad, false);
    }
}

template <typename T>
void module_suite(const GradcheckOptions& opts, std::vector<GradcheckResult>& out) {
    numerics::Prng prng(opts.seed, 0x67636B);

    auto projection_check = [&](const std::string& name, auto& ma, auto& mr, const Shape& in_shape, double in_scale) {
        const auto x = random_tensor(in_shape, prng, in_scale);
        Projection proj;
        proj.r = random_tensor(Shape{}, prng, 1.0);  // resized below
        auto ya = mr.forward(x);
        proj.r = random_tensor(ya.shape, prng, 1.0);
        auto loss = [proj](const Tensor<double>& y) { return proj(y); };
        auto loss_grad = [proj](const Tensor<double>&) { return proj.r; };
        check<T>(name, make_probe<std::remove_reference_t<decltype(ma)>, T>(ma),
                 make_probe<std::remove_reference_t<decltype(mr)>, double>(mr), x, loss, loss_grad, opts, out);
    };

    // Kernel/stride/padding combinations: a generic one plus each specialised path.
    const std::size_t conv_shapes[][3] = {{5, 2, 2}, {3, 1, 1}, {3, 2, 1}, {1, 2, 0}, {7, 2, 3}};
    for (const auto& cs : conv_shapes) {
        Conv1d<T> a(3, 4, cs[0], cs[1], cs[2], true);
        Conv1d<double> r(3, 4, cs[0], cs[1], cs[2], true);
        a.init(prng);
        for (auto& b : a.bias.data) b = static_cast<T>(0.1 * prng.normal());
        projection_check("conv1d_k" + std::to_string(cs[0]) + "s" + std::to_string(cs[1]), a, r, {2, 3, 17}, 1.0);
    }
    {
        Linear<T> a(7, 5);
        Linear<double> r(7, 5);
        a.init(prng);
        projection_check("linear", a, r, {3, 7}, 1.0);
    }
    {
        Relu<T> a;
        Relu<double> r;
        projection_check("relu", a, r, {2, 3, 9}, 1.0);
    }
    {
        Sigmoid<T> a;
        Sigmoid<double> r;
        projection_check("sigmoid", a, r, {3, 8}, 3.0);
    }
    {
        MaxPoolLen<T> a;
        MaxPoolLen<double> r;
        projection_check("maxpool", a, r, {2, 4, 11}, 1.0);
    }
    {
        AvgPoolLen<T> a;
        AvgPoolLen<double> r;
        projection_check("avgpool", a, r, {2, 4, 11}, 1.0);
    }
    {
        BatchNorm1d<T> a(4);
        BatchNorm1d<double> r(4);
        for (auto& g : a.gamma.data) g = static_cast<T>(1.0 + 0.3 * prng.normal());
        for (auto& b : a.beta.data) b = static_cast<T>(0.3 * prng.normal());
        projection_check("batchnorm", a, r, {3, 4, 10}, 2.0);
    }
    {
        IfftLayer<T> a;
        IfftLayer<double> r;
        projection_check("ifft", a, r, {2, 2, 32}, 1.0);
    }
    {
        MagnitudeLayer<T> a;
        MagnitudeLayer<double> r;
        projection_check("magnitude", a, r, {2, 2, 16}, 1.0);
    }
    {
        // Cross-entropy: the "module" is the identity on logits and the loss does the work.
        const auto logits = random_tensor({4, 6}, prng, 2.0);
        const std::vector<int> labels = {0, 3, 5, 2};
        struct Identity {
            Tensor<double> forward(const Tensor<double>& x) { return x; }
            Tensor<double> backward(const Tensor<double>& d) { return d; }
        };
        struct IdentityT {
            Tensor<T> forward(const Tensor<T>& x) { return x; }
            Tensor<T> backward(const Tensor<T>& d) { return d; }
        };
        IdentityT a;
        Identity r;
        auto loss = [labels](const Tensor<double>& y) { return softmax_cross_entropy<double>(y, labels, nullptr); };
        auto loss_grad = [labels](const Tensor<double>& y) {
            Tensor<double> g;
            softmax_cross_entropy<double>(y, labels, &g);
            return g;
        };
        check<T>("cross_entropy", make_probe<IdentityT, T>(a), make_probe<Identity, double>(r), logits, loss, loss_grad,
                 opts, out);
    }
    {
        CfaConfig cfg{4, 8, 2, 3, 4};
        CfaModule<T> a(cfg);
        CfaModule<double> r(cfg);
        a.init(prng);
        // Zero-initialised output layer would hide the upstream gradients.
        std::vector<NamedTensor<T>> ps;
        a.collect(ps, "");
        for (auto& p : ps) {
            if (p.name.rfind(".fc2", 0) == 0) {
                for (auto& v : p.tensor->data) v = static_cast<T>(0.5 * prng.normal());
            }
        }
        struct CfaAdaptorT {
            CfaModule<T>* m;
            Tensor<T> forward(const Tensor<T>& x) { return m->forward(x).weighted; }
            Tensor<T> backward(const Tensor<T>& d) { return m->backward(d); }
            void collect(std::vector<NamedTensor<T>>& v, const std::string& p) { m->collect(v, p); }
        };
        struct CfaAdaptorD {
            CfaModule<double>* m;
            Tensor<double> forward(const Tensor<double>& x) { return m->forward(x).weighted; }
            Tensor<double> backward(const Tensor<double>& d) { return m->backward(d); }
            void collect(std::vector<NamedTensor<double>>& v, const std::string& p) { m->collect(v, p); }
        };
        CfaAdaptorT at{&a};
        CfaAdaptorD ar{&r};
        projection_check("cfa", at, ar, {3, 2, 32}, 1.0);
    }
    {
        ResidualBlock1d<T> a(3, 5, 2);
        ResidualBlock1d<double> r(3, 5, 2);
        a.init(prng);
        projection_check("residual_block", a, r, {3, 3, 16}, 1.0);
    }
}

template <typename T>
void network_suite(const GradcheckOptions& opts, std::vector<GradcheckResult>& out) {
    numerics::Prng prng(opts.seed, 0x6E6574);
    NetworkConfig cfg;
    Network<T> a(cfg);
    Network<double> r(cfg);
    a.init(opts.seed);
    for (auto& p : a.parameters()) {
        if (p.name.rfind("cfa.fc2", 0) == 0) {
            for (auto& v : p.tensor->data) v = static_cast<T>(0.3 * prng.normal());
        }
    }
    const std::size_t n = cfg.cfa.channels * cfg.cfa.length;
    const auto x = random_tensor({2, 2, n}, prng, 1.0);
    const std::vector<int> labels = {1, 4};
    auto loss = [labels](const Tensor<double>& y) { return softmax_cross_entropy<double>(y, labels, nullptr); };
    auto loss_grad = [labels](const Tensor<double>& y) {
        Tensor<double> g;
        softmax_cross_entropy<double>(y, labels, &g);
        return g;
    };
    GradcheckOptions o = opts;
    o.samples_per_tensor = std::min<std::size_t>(opts.samples_per_tensor, 2);
    Probe<T> pa{[&](const Tensor<T>& in) { return a.forward(in); }, [&](const Tensor<T>& d) { return a.backward(d); },
                [&]() { return a.parameters(); }};
    Probe<double> pr{[&](const Tensor<double>& in) { return r.forward(in); },
                     [&](const Tensor<double>& d) { return r.backward(d); }, [&]() { return r.parameters(); }};
    check<T>("network", pa, pr, x, loss, loss_grad, o, out);
}

}  // namespace

std::vector<GradcheckResult> run_gradcheck_suite(const GradcheckOptions& opts) {
    std::vector<GradcheckResult> out;
    if (opts.f64) {
        module_suite<double>(opts, out);
        network_suite<double>(opts, out);
    } else {
        module_suite<float>(opts, out);
        network_suite<float>(opts, out);
    }
    return out;
}

}  // namespace hrrpnet::neural
