#pragma once

#include <cmath>
#include <cstdint>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "olg/latent.hpp"
#include "olg/rng.hpp"

namespace olg {

// Feed-forward policy: n*d -> hidden -> d, tanh activations throughout.
// The action distribution during training is N(forward(state), sigma^2 I),
// clamped to [-1,1]^d at the designer boundary. sigma = 0 gives the
// deterministic evaluation policy the SSC oracle reasons about.
struct PolicyNetwork {
    int in = 0, hidden = 0, out = 0;
    std::vector<double> w1; // hidden x in, row-major
    std::vector<double> b1; // hidden
    std::vector<double> w2; // out x hidden, row-major
    std::vector<double> b2; // out
    double sigma = 0.0;

    static PolicyNetwork zeros(int in, int hidden, int out) {
        PolicyNetwork net;
        net.in = in;
        net.hidden = hidden;
        net.out = out;
        net.w1.assign(static_cast<std::size_t>(hidden) * in, 0.0);
        net.b1.assign(static_cast<std::size_t>(hidden), 0.0);
        net.w2.assign(static_cast<std::size_t>(out) * hidden, 0.0);
        net.b2.assign(static_cast<std::size_t>(out), 0.0);
        return net;
    }

    // Scaled uniform init, a / sqrt(fan_in) per layer. The scale is chosen so
    // the induced state transition is contractive: iterated evaluation
    // converges instead of wandering chaotically.
    static PolicyNetwork random_init(int in, int hidden, int out, double scale, Rng& rng) {
        PolicyNetwork net = zeros(in, hidden, out);
        double s1 = scale / std::sqrt(static_cast<double>(in));
        double s2 = scale / std::sqrt(static_cast<double>(hidden));
        for (double& w : net.w1) w = s1 * rng.next_symmetric();
        for (double& w : net.w2) w = s2 * rng.next_symmetric();
        return net;
    }

    std::size_t parameter_count() const {
        return w1.size() + b1.size() + w2.size() + b2.size();
    }

    bool finite() const {
        auto ok = [](const std::vector<double>& v) {
            for (double x : v)
                if (!std::isfinite(x)) return false;
            return true;
        };
        return ok(w1) && ok(b1) && ok(w2) && ok(b2);
    }
};

// Gradient with the same shape as the network parameters.
struct PolicyGradient {
    std::vector<double> w1, b1, w2, b2;

    static PolicyGradient zeros_like(const PolicyNetwork& net) {
        PolicyGradient g;
        g.w1.assign(net.w1.size(), 0.0);
        g.b1.assign(net.b1.size(), 0.0);
        g.w2.assign(net.w2.size(), 0.0);
        g.b2.assign(net.b2.size(), 0.0);
        return g;
    }

    void axpy(double a, const PolicyGradient& other) {
        for (std::size_t i = 0; i < w1.size(); ++i) w1[i] += a * other.w1[i];
        for (std::size_t i = 0; i < b1.size(); ++i) b1[i] += a * other.b1[i];
        for (std::size_t i = 0; i < w2.size(); ++i) w2[i] += a * other.w2[i];
        for (std::size_t i = 0; i < b2.size(); ++i) b2[i] += a * other.b2[i];
    }
};

inline void apply_gradient(PolicyNetwork& net, const PolicyGradient& g, double step) {
    for (std::size_t i = 0; i < net.w1.size(); ++i) net.w1[i] += step * g.w1[i];
    for (std::size_t i = 0; i < net.b1.size(); ++i) net.b1[i] += step * g.b1[i];
    for (std::size_t i = 0; i < net.w2.size(); ++i) net.w2[i] += step * g.w2[i];
    for (std::size_t i = 0; i < net.b2.size(); ++i) net.b2[i] += step * g.b2[i];
}

// Mean action: tanh(W2 tanh(W1 x + b1) + b2), components strictly in (-1,1).
inline LatentVector forward(const PolicyNetwork& net, const DesignerState& state) {
    std::vector<double> x = state.flat();
    if (static_cast<int>(x.size()) != net.in)
        throw std::invalid_argument("forward: state dimension mismatch");
    std::vector<double> h(static_cast<std::size_t>(net.hidden));
    for (int i = 0; i < net.hidden; ++i) {
        double acc = net.b1[static_cast<std::size_t>(i)];
        const double* row = net.w1.data() + static_cast<std::size_t>(i) * net.in;
        for (int j = 0; j < net.in; ++j) acc += row[j] * x[static_cast<std::size_t>(j)];
        h[static_cast<std::size_t>(i)] = std::tanh(acc);
    }
    LatentVector y(static_cast<std::size_t>(net.out));
    for (int i = 0; i < net.out; ++i) {
        double acc = net.b2[static_cast<std::size_t>(i)];
        const double* row = net.w2.data() + static_cast<std::size_t>(i) * net.hidden;
        for (int j = 0; j < net.hidden; ++j) acc += row[j] * h[static_cast<std::size_t>(j)];
        y[static_cast<std::size_t>(i)] = std::tanh(acc);
    }
    return y;
}

// Analytic gradient of log N(action; forward(net, state), sigma^2 I) with
// respect to all network parameters. Backprop through both tanh layers.
inline PolicyGradient grad_log_prob(const PolicyNetwork& net, const DesignerState& state,
                                    const LatentVector& action) {
    if (net.sigma <= 0.0) throw std::invalid_argument("grad_log_prob: sigma must be positive");
    std::vector<double> x = state.flat();
    if (static_cast<int>(x.size()) != net.in)
        throw std::invalid_argument("grad_log_prob: state dimension mismatch");
    if (static_cast<int>(action.size()) != net.out)
        throw std::invalid_argument("grad_log_prob: action dimension mismatch");

    std::vector<double> h(static_cast<std::size_t>(net.hidden));
    for (int i = 0; i < net.hidden; ++i) {
        double acc = net.b1[static_cast<std::size_t>(i)];
        const double* row = net.w1.data() + static_cast<std::size_t>(i) * net.in;
        for (int j = 0; j < net.in; ++j) acc += row[j] * x[static_cast<std::size_t>(j)];
        h[static_cast<std::size_t>(i)] = std::tanh(acc);
    }
    std::vector<double> mu(static_cast<std::size_t>(net.out));
    for (int i = 0; i < net.out; ++i) {
        double acc = net.b2[static_cast<std::size_t>(i)];
        const double* row = net.w2.data() + static_cast<std::size_t>(i) * net.hidden;
        for (int j = 0; j < net.hidden; ++j) acc += row[j] * h[static_cast<std::size_t>(j)];
        mu[static_cast<std::size_t>(i)] = std::tanh(acc);
    }

    PolicyGradient g = PolicyGradient::zeros_like(net);
    double inv_var = 1.0 / (net.sigma * net.sigma);
    // d logp / d pre-activation of the output layer
    std::vector<double> delta_out(static_cast<std::size_t>(net.out));
    for (int i = 0; i < net.out; ++i) {
        double m = mu[static_cast<std::size_t>(i)];
        delta_out[static_cast<std::size_t>(i)] =
            (action[static_cast<std::size_t>(i)] - m) * inv_var * (1.0 - m * m);
    }
    for (int i = 0; i < net.out; ++i) {
        g.b2[static_cast<std::size_t>(i)] = delta_out[static_cast<std::size_t>(i)];
        for (int j = 0; j < net.hidden; ++j)
            g.w2[static_cast<std::size_t>(i) * net.hidden + j] =
                delta_out[static_cast<std::size_t>(i)] * h[static_cast<std::size_t>(j)];
    }
    for (int j = 0; j < net.hidden; ++j) {
        double acc = 0.0;
        for (int i = 0; i < net.out; ++i)
            acc += delta_out[static_cast<std::size_t>(i)] *
                   net.w2[static_cast<std::size_t>(i) * net.hidden + j];
        double hj = h[static_cast<std::size_t>(j)];
        double delta_h = acc * (1.0 - hj * hj);
        g.b1[static_cast<std::size_t>(j)] = delta_h;
        for (int k = 0; k < net.in; ++k)
            g.w1[static_cast<std::size_t>(j) * net.in + k] = delta_h * x[static_cast<std::size_t>(k)];
    }
    return g;
}

// log-density of the clamped-free Gaussian policy, used by tests.
inline double log_prob(const PolicyNetwork& net, const DesignerState& state,
                       const LatentVector& action) {
    if (net.sigma <= 0.0) throw std::invalid_argument("log_prob: sigma must be positive");
    LatentVector mu = forward(net, state);
    double acc = 0.0;
    for (std::size_t i = 0; i < mu.size(); ++i) {
        double diff = action[i] - mu[i];
        acc += diff * diff;
    }
    double k = static_cast<double>(mu.size());
    return -0.5 * acc / (net.sigma * net.sigma) -
           k * std::log(net.sigma) - 0.5 * k * std::log(2.0 * 3.14159265358979323846);
}

// The policy pi. `random` ignores the state (MarioGAN-style sampler),
// `periodic` cycles through a fixed action list by step index (known-SSC
// control case), `neural` is the trainable Gaussian policy.
struct Designer {
    enum class Kind { Random, Periodic, Neural };
    Kind kind = Kind::Random;
    int d = 8;
    std::vector<LatentVector> periodic_actions;
    PolicyNetwork net;

    static Designer random_sampler(int d) {
        Designer dz;
        dz.kind = Kind::Random;
        dz.d = d;
        return dz;
    }

    static Designer periodic(std::vector<LatentVector> actions) {
        if (actions.empty()) throw std::invalid_argument("periodic designer: empty action list");
        Designer dz;
        dz.kind = Kind::Periodic;
        dz.d = static_cast<int>(actions.front().size());
        dz.periodic_actions = std::move(actions);
        return dz;
    }

    static Designer neural(PolicyNetwork network) {
        Designer dz;
        dz.kind = Kind::Neural;
        dz.d = network.out;
        dz.net = std::move(network);
        return dz;
    }

    // step is the global action index of the episode, used only by the
    // periodic kind.
    LatentVector act(const DesignerState& state, int step, Rng& rng) const {
        switch (kind) {
        case Kind::Random:
            return sample_latent(d, rng);
        case Kind::Periodic:
            return periodic_actions[static_cast<std::size_t>(step) % periodic_actions.size()];
        case Kind::Neural: {
            if (state.n() * state.d() != net.in)
                throw std::invalid_argument("act: state dimension mismatch");
            LatentVector a = forward(net, state);
            if (net.sigma > 0.0)
                for (double& c : a) c += net.sigma * rng.next_gaussian();
            clamp_latent(a);
            return a;
        }
        }
        throw std::logic_error("act: unknown designer kind");
    }

    bool deterministic() const {
        return kind != Kind::Random && (kind != Kind::Neural || net.sigma == 0.0);
    }
};

// Checkpoint: header (kind, dims, sigma) followed by a decimal weight dump.
inline void save_designer(std::ostream& out, const Designer& dz) {
    out.precision(17);
    if (dz.kind == Designer::Kind::Random) {
        out << "designer random " << dz.d << '\n';
    } else if (dz.kind == Designer::Kind::Periodic) {
        out << "designer periodic " << dz.d << ' ' << dz.periodic_actions.size() << '\n';
        for (const auto& a : dz.periodic_actions) {
            for (std::size_t i = 0; i < a.size(); ++i) out << (i ? " " : "") << a[i];
            out << '\n';
        }
    } else {
        out << "designer neural " << dz.net.in << ' ' << dz.net.hidden << ' ' << dz.net.out
            << ' ' << dz.net.sigma << '\n';
        auto dump = [&](const std::vector<double>& v) {
            for (std::size_t i = 0; i < v.size(); ++i) out << (i ? " " : "") << v[i];
            out << '\n';
        };
        dump(dz.net.w1);
        dump(dz.net.b1);
        dump(dz.net.w2);
        dump(dz.net.b2);
    }
}

inline Designer load_designer(std::istream& in) {
    std::string tag, kind;
    if (!(in >> tag >> kind) || tag != "designer")
        throw std::invalid_argument("load_designer: bad header");
    if (kind == "random") {
        int d = 0;
        if (!(in >> d)) throw std::invalid_argument("load_designer: bad random header");
        return Designer::random_sampler(d);
    }
    if (kind == "periodic") {
        int d = 0;
        std::size_t count = 0;
        if (!(in >> d >> count)) throw std::invalid_argument("load_designer: bad periodic header");
        std::vector<LatentVector> actions(count, LatentVector(static_cast<std::size_t>(d)));
        for (auto& a : actions)
            for (double& v : a)
                if (!(in >> v)) throw std::invalid_argument("load_designer: truncated actions");
        return Designer::periodic(std::move(actions));
    }
    if (kind == "neural") {
        PolicyNetwork net;
        if (!(in >> net.in >> net.hidden >> net.out >> net.sigma))
            throw std::invalid_argument("load_designer: bad neural header");
        net = [&] {
            PolicyNetwork n2 = PolicyNetwork::zeros(net.in, net.hidden, net.out);
            n2.sigma = net.sigma;
            return n2;
        }();
        auto slurp = [&](std::vector<double>& v) {
            for (double& x : v)
                if (!(in >> x)) throw std::invalid_argument("load_designer: truncated weights");
        };
        slurp(net.w1);
        slurp(net.b1);
        slurp(net.w2);
        slurp(net.b2);
        return Designer::neural(std::move(net));
    }
    throw std::invalid_argument("load_designer: unknown kind " + kind);
}

} // namespace olg
