#include "morseflow/fixtures.hpp"

#include <array>
#include <cmath>
#include <sstream>

namespace morseflow {

AmbientMap sphere_constraint() {
    Poly3 G({{2, 0, 0, 1.0}, {0, 2, 0, 1.0}, {0, 0, 2, 1.0}, {0, 0, 0, -1.0}});
    return G.as_map();
}

AmbientMap peanut_constraint() {
    // (x^2-1)^2 + y^2 + z^2 - 1.2 = x^4 - 2x^2 + y^2 + z^2 - 0.2
    Poly3 G({{4, 0, 0, 1.0}, {2, 0, 0, -2.0}, {0, 2, 0, 1.0}, {0, 0, 2, 1.0}, {0, 0, 0, -0.2}});
    return G.as_map();
}

ScalarField height_field(double tilt_x) {
    std::vector<Poly3::Term> terms{{0, 0, 1, 1.0}};
    if (tilt_x != 0.0) terms.push_back({1, 0, 0, tilt_x});
    return ScalarField::from_poly(tilt_x == 0.0 ? "height" : "height-tilted", Poly3(terms));
}

ScalarField ellipsoid_field(double a1, double a2, double a3) {
    Poly3 p({{2, 0, 0, a1}, {0, 2, 0, a2}, {0, 0, 2, a3}});
    return ScalarField::from_poly("ellipsoid-quadratic", p);
}

// Sum of terms c * cos(2 pi (a x + b y - phase)); derivative data analytic.
ScalarField torus_trig_field(const std::string& name,
                             const std::vector<std::array<double, 4>>& terms) {
    auto value = [terms](const Vec& p) {
        double s = 0.0;
        for (const auto& t : terms) s += t[0] * std::cos(2.0 * M_PI * (t[1] * p[0] + t[2] * p[1] - t[3]));
        return s;
    };
    auto grad = [terms](const Vec& p) {
        Vec g = Vec::Zero(2);
        for (const auto& t : terms) {
            const double w = 2.0 * M_PI * (t[1] * p[0] + t[2] * p[1] - t[3]);
            const double d = -t[0] * 2.0 * M_PI * std::sin(w);
            g[0] += d * t[1];
            g[1] += d * t[2];
        }
        return g;
    };
    auto hess = [terms](const Vec& p) {
        Mat h = Mat::Zero(2, 2);
        for (const auto& t : terms) {
            const double w = 2.0 * M_PI * (t[1] * p[0] + t[2] * p[1] - t[3]);
            const double d2 = -t[0] * 4.0 * M_PI * M_PI * std::cos(w);
            h(0, 0) += d2 * t[1] * t[1];
            h(0, 1) += d2 * t[1] * t[2];
            h(1, 0) += d2 * t[1] * t[2];
            h(1, 1) += d2 * t[2] * t[2];
        }
        return h;
    };
    ScalarField f(name, value);
    f.with_gradient(grad).with_hessian(hess);
    return f;
}

ScalarField torus_cosine_field(double c1, double c2, double phase_x, double phase_y) {
    return torus_trig_field("torus-cosine",
                            {{c1, 1.0, 0.0, phase_x}, {c2, 0.0, 1.0, phase_y}});
}

ScalarField monkey_saddle_field() {
    auto value = [](const Vec& p) {
        return std::sin(M_PI * p[0]) * std::sin(M_PI * p[1]) * std::sin(M_PI * (p[0] + p[1]));
    };
    auto grad = [](const Vec& p) {
        const double sx = std::sin(M_PI * p[0]), cx = std::cos(M_PI * p[0]);
        const double sy = std::sin(M_PI * p[1]), cy = std::cos(M_PI * p[1]);
        const double sxy = std::sin(M_PI * (p[0] + p[1])), cxy = std::cos(M_PI * (p[0] + p[1]));
        Vec g(2);
        g[0] = M_PI * (cx * sy * sxy + sx * sy * cxy);
        g[1] = M_PI * (sx * cy * sxy + sx * sy * cxy);
        return g;
    };
    auto hess = [](const Vec& p) {
        const double sx = std::sin(M_PI * p[0]), cx = std::cos(M_PI * p[0]);
        const double sy = std::sin(M_PI * p[1]), cy = std::cos(M_PI * p[1]);
        const double sxy = std::sin(M_PI * (p[0] + p[1])), cxy = std::cos(M_PI * (p[0] + p[1]));
        const double pi2 = M_PI * M_PI;
        Mat h(2, 2);
        h(0, 0) = pi2 * (-sx * sy * sxy + 2.0 * cx * sy * cxy - sx * sy * sxy);
        h(1, 1) = pi2 * (-sx * sy * sxy + 2.0 * sx * cy * cxy - sx * sy * sxy);
        h(0, 1) = pi2 * (cx * cy * sxy + cx * sy * cxy + sx * cy * cxy - sx * sy * sxy);
        h(1, 0) = h(0, 1);
        return h;
    };
    ScalarField f("monkey-saddle", value);
    f.with_gradient(grad).with_hessian(hess);
    return f;
}

ScalarField monkey_saddle_perturbed(double eps) {
    ScalarField base = monkey_saddle_field();
    ScalarField bump = torus_cosine_field(eps, 2.0 * eps);
    std::ostringstream name;
    name << "monkey-saddle-perturbed(" << eps << ")";
    ScalarField f(name.str(),
                  [base, bump](const Vec& p) { return base.value(p) + bump.value(p); });
    f.with_gradient([base, bump](const Vec& p) {
         return (base.ambient_gradient(p) + bump.ambient_gradient(p)).eval();
     })
        .with_hessian([base, bump](const Vec& p) {
            return (base.ambient_hessian(p) + bump.ambient_hessian(p)).eval();
        });
    return f;
}

ScalarField real_line_parabola() {
    ScalarField f("parabola", [](const Vec& p) { return p[0] * p[0]; });
    f.with_gradient([](const Vec& p) { return Vec::Constant(1, 2.0 * p[0]).eval(); })
        .with_hessian([](const Vec&) { return Mat::Constant(1, 1, 2.0).eval(); });
    return f;
}

ScalarField real_line_slope() {
    ScalarField f("slope", [](const Vec& p) { return p[0]; });
    f.with_gradient([](const Vec&) { return Vec::Constant(1, 1.0).eval(); })
        .with_hessian([](const Vec&) { return Mat::Zero(1, 1).eval(); });
    return f;
}

ScalarField real_line_many_minima(int n) {
    // n maxima, n+1 minima on (0,1), diverging at both ends
    const double A = 2e-3;
    const double w = 2.0 * M_PI * double(n + 1);
    std::ostringstream name;
    name << "many-minima(" << n << ")";
    ScalarField f(name.str(), [A, w](const Vec& p) {
        const double x = p[0];
        return A * (1.0 / x + 1.0 / (1.0 - x)) + 1.0 + std::cos(w * x);
    });
    f.with_gradient([A, w](const Vec& p) {
         const double x = p[0];
         return Vec::Constant(1, A * (-1.0 / (x * x) + 1.0 / sq(1.0 - x)) - w * std::sin(w * x))
             .eval();
     })
        .with_hessian([A, w](const Vec& p) {
            const double x = p[0];
            return Mat::Constant(1, 1,
                                 A * (2.0 / (x * x * x) + 2.0 / (sq(1.0 - x) * (1.0 - x))) -
                                     w * w * std::cos(w * x))
                .eval();
        });
    return f;
}

namespace {

ChainComplexGF2 heart_complex() {
    return make_abstract_complex(
        {{{"z", 0.0}}, {{"y", 2.0}}, {{"x1", 5.0}, {"x2", 4.0}}},
        {{}, {{0}}, {{1, 1}}});
}

ChainComplexGF2 punctured_heart_complex() {
    // stolen point on one saddle-to-minimum line: boundary of y becomes z
    return make_abstract_complex(
        {{{"z", 0.0}}, {{"y", 2.0}}, {{"x1", 5.0}, {"x2", 4.0}}},
        {{}, {{1}}, {{1, 1}}});
}

ChainComplexGF2 genus_g_complex(int g) {
    std::vector<Generator> deg0{{"min", 0.0}};
    std::vector<Generator> deg1;
    for (int i = 0; i < 2 * g; ++i)
        deg1.push_back({"s" + std::to_string(i), 1.0 + 0.01 * double(i)});
    std::vector<Generator> deg2{{"max", 2.0}};
    std::vector<std::vector<int>> b1(1, std::vector<int>(size_t(2 * g), 0));
    std::vector<std::vector<int>> b2(size_t(2 * g), std::vector<int>(1, 0));
    return make_abstract_complex({deg0, deg1, deg2}, {{}, b1, b2});
}

Scene base_scene(const std::string& name) {
    Scene sc;
    sc.name = name;
    return sc;
}

Scene sphere_scene(const std::string& name, ScalarField f) {
    Scene sc = base_scene(name);
    sc.model = ManifoldModel::implicit_surface(sphere_constraint(), {MetricKind::Induced, {}},
                                               Vec::Constant(3, -1.2), Vec::Constant(3, 1.2));
    sc.field = std::move(f);
    return sc;
}

std::vector<double> parse_args(const std::string& name, size_t paren) {
    std::vector<double> args;
    const std::string inner = name.substr(paren + 1, name.size() - paren - 2);
    std::istringstream ss(inner);
    std::string tok;
    while (std::getline(ss, tok, ','))
        if (!tok.empty()) args.push_back(std::stod(tok));
    return args;
}

} // namespace

std::vector<std::string> builtin_fixtures() {
    return {
        "round-sphere",
        "ellipsoid",
        "rp2-ellipsoid",
        "peanut-sphere",
        "peanut-upright",
        "torus-cosine",
        "torus-cosine-quarter",
        "torus-cosine-half",
        "torus-cosine-diag-metric",
        "monkey-saddle",
        "monkey-saddle-perturbed",
        "real-line-parabola",
        "real-line-slope",
        "real-line-many-minima",
        "heart-complex",
        "punctured-heart",
        "genus-g-complex",
        "three-scene-chain",
    };
}

bool is_builtin_fixture(const std::string& name) {
    std::string head = name;
    const size_t paren = name.find('(');
    if (paren != std::string::npos) head = name.substr(0, paren);
    for (const auto& f : builtin_fixtures())
        if (f == head) return true;
    return false;
}

Scene make_fixture(const std::string& name) {
    std::string head = name;
    std::vector<double> args;
    const size_t paren = name.find('(');
    if (paren != std::string::npos && name.back() == ')') {
        head = name.substr(0, paren);
        args = parse_args(name, paren);
    }

    if (head == "round-sphere") return sphere_scene(name, height_field());
    if (head == "ellipsoid") {
        double a1 = 1, a2 = 2, a3 = 3;
        if (args.size() == 3) {
            a1 = args[0];
            a2 = args[1];
            a3 = args[2];
        }
        return sphere_scene(name, ellipsoid_field(a1, a2, a3));
    }
    if (head == "rp2-ellipsoid") {
        Scene sc = base_scene(name);
        sc.model = ManifoldModel::antipodal_quotient(sphere_constraint(), Vec::Constant(3, -1.2),
                                                     Vec::Constant(3, 1.2));
        double a1 = 1, a2 = 2, a3 = 3;
        if (args.size() == 3) {
            a1 = args[0];
            a2 = args[1];
            a3 = args[2];
        }
        sc.field = ellipsoid_field(a1, a2, a3);
        return sc;
    }
    if (head == "peanut-sphere" || head == "peanut-upright") {
        Scene sc = base_scene(name);
        Vec lo(3), hi(3);
        lo << -1.6, -1.2, -1.2;
        hi << 1.6, 1.2, 1.2;
        sc.model = ManifoldModel::implicit_surface(peanut_constraint(), {MetricKind::Induced, {}},
                                                   lo, hi);
        sc.field = height_field(head == "peanut-sphere" ? 0.15 : 0.0);
        sc.search.seed_count = 1024;
        return sc;
    }
    if (head == "torus-cosine") {
        Scene sc = base_scene(name);
        sc.model = ManifoldModel::flat_torus(2);
        double c1 = 1, c2 = 2;
        if (args.size() == 2) {
            c1 = args[0];
            c2 = args[1];
        }
        sc.field = torus_cosine_field(c1, c2);
        return sc;
    }
    if (head == "torus-cosine-quarter") {
        Scene sc = base_scene(name);
        sc.model = ManifoldModel::flat_torus(2);
        sc.field = torus_cosine_field(1.0, 2.0, 0.25, 0.0);
        return sc;
    }
    if (head == "torus-cosine-half") {
        Scene sc = base_scene(name);
        sc.model = ManifoldModel::flat_torus(2);
        sc.field = torus_cosine_field(1.0, 2.0, 0.5, 0.0);
        return sc;
    }
    if (head == "torus-cosine-diag-metric") {
        Scene sc = base_scene(name);
        Mat g(2, 2);
        g << 1.0, 0.0, 0.0, 2.0;
        sc.model = ManifoldModel::flat_torus(2, {MetricKind::Explicit, g});
        sc.field = torus_cosine_field(1.0, 2.0);
        return sc;
    }
    if (head == "monkey-saddle") {
        Scene sc = base_scene(name);
        sc.model = ManifoldModel::flat_torus(2);
        sc.field = monkey_saddle_field();
        return sc;
    }
    if (head == "monkey-saddle-perturbed") {
        Scene sc = base_scene(name);
        sc.model = ManifoldModel::flat_torus(2);
        sc.field = monkey_saddle_perturbed(args.empty() ? 0.1 : args[0]);
        return sc;
    }
    if (head == "real-line-parabola") {
        Scene sc = base_scene(name);
        sc.model = ManifoldModel::real_line(-3.0, 3.0);
        sc.field = real_line_parabola();
        return sc;
    }
    if (head == "real-line-slope") {
        Scene sc = base_scene(name);
        sc.model = ManifoldModel::real_line(-3.0, 3.0);
        sc.field = real_line_slope();
        return sc;
    }
    if (head == "real-line-many-minima") {
        const int n = args.empty() ? 3 : int(args[0]);
        Scene sc = base_scene(name);
        sc.model = ManifoldModel::real_line(1e-4, 1.0 - 1e-4);
        sc.field = real_line_many_minima(n);
        sc.search.seed_count = 2048;
        return sc;
    }
    if (head == "heart-complex") {
        Scene sc = base_scene(name);
        sc.is_abstract = true;
        sc.abstract_complex = heart_complex();
        return sc;
    }
    if (head == "punctured-heart") {
        Scene sc = base_scene(name);
        sc.is_abstract = true;
        sc.abstract_complex = punctured_heart_complex();
        return sc;
    }
    if (head == "genus-g-complex") {
        Scene sc = base_scene(name);
        sc.is_abstract = true;
        sc.abstract_complex = genus_g_complex(args.empty() ? 2 : int(args[0]));
        return sc;
    }
    if (head == "three-scene-chain") {
        // marker fixture: the chain is (torus-cosine, -quarter, -half); the
        // continue subcommand accepts those scene names directly
        Scene sc = make_fixture("torus-cosine");
        sc.name = name;
        return sc;
    }
    throw UnknownFixture("unknown fixture: " + name);
}

} // namespace morseflow
