#include "euler/config.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace euler {

namespace {

[[noreturn]] void fail(const std::string& constraint) {
    throw std::invalid_argument("config: violated constraint: " + constraint);
}

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

double parse_double(const std::string& v, const std::string& key) {
    if (v == "inf") return std::numeric_limits<double>::infinity();
    try {
        size_t pos = 0;
        const double x = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw std::invalid_argument("config: bad numeric value for " + key + ": " + v);
    }
}

std::string format_double(double x) {
    if (std::isinf(x)) return "inf";
    std::ostringstream os;
    os.precision(17);
    os << x;
    return os.str();
}

}  // namespace

void RunConfig::validate() const {
    if (N < 4 || N % 2 != 0) fail("grid.N: even and >= 4");
    if (dt <= 0.0) fail("grid.dt: > 0");
    if (T <= 0.0) fail("grid.T: > 0");
    if (c_g < 0.0) fail("noise.c_g: >= 0");
    if (sigma <= 0.0) fail("noise.sigma: > 0");
    if (!(gamma > 3.0 + sigma / 2.0)) fail("noise.gamma: > 3 + sigma/2");
    if (noise_cutoff < 0) fail("noise.cutoff: >= 0");
    if (noise_cutoff > N / 2 - 1) fail("noise.cutoff: <= N/2 - 1");
    if (n_cutoff < 1) fail("solver.n: >= 1");
    if (nu_override >= 0.0 && nu_override == 0.0) fail("solver.nu: > 0 when set");
    if (!(delta > 0.0 && delta < 0.25)) fail("parameters.delta: in (0, 1/4)");
    if (!(p_exp > 1.0)) fail("parameters.p: > 1");
    if (!(beta > 0.5 - 2.0 * delta + 1.0 / p_exp && beta < 0.5 - delta))
        fail("parameters.beta: in (1/2 - 2 delta + 1/p, 1/2 - delta)");
    if (!(alpha > 2.0 / 3.0 && alpha < 1.0)) fail("parameters.alpha: in (2/3, 1)");
    if (!(q_exp > 1.0)) fail("parameters.q: > 1");
    if (!(alpha * q_exp > 2.0)) fail("parameters.alpha_q: alpha * q > 2");
    if (!(1.5 * alpha - 2.0 / q_exp > 1.0))
        fail("parameters.alpha_q_sobolev: 3 alpha / 2 - 2 / q > 1");
    if (!(k_exp > 1.5)) fail("parameters.k: > 3/2");
    if (!(L > 1.0)) fail("parameters.L: > 1");
    if (K < 0) fail("parameters.K: >= 0");
    if (!(eps > 0.0)) fail("parameters.eps: > 0");
    if (!(lambda > 0.0)) fail("parameters.lambda: > 0");
    if (l_list.empty()) fail("wild.l: nonempty");
    for (double l : l_list)
        if (!(l >= 2.0)) fail("wild.l: every entry in [2, inf]");
    if (seed < 1) fail("run.seed: >= 1");
    if (ensemble < 1) fail("run.ensemble: >= 1");
    if (out.empty()) fail("run.out: nonempty");
}

RunConfig parse_config(const std::string& text) {
    RunConfig c;
    c.l_list.clear();
    bool l_seen = false;
    std::istringstream in(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw std::invalid_argument("config: malformed section at line " +
                                            std::to_string(lineno));
            section = trim(line.substr(1, line.size() - 2));
            if (section != "grid" && section != "noise" && section != "solver" &&
                section != "parameters" && section != "wild" && section != "run")
                throw std::invalid_argument("config: unknown section [" + section + "]");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config: expected key = value at line " +
                                        std::to_string(lineno));
        const std::string key = section + "." + trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));

        if (key == "grid.N") c.N = int(parse_double(val, key));
        else if (key == "grid.dt") c.dt = parse_double(val, key);
        else if (key == "grid.T") c.T = parse_double(val, key);
        else if (key == "noise.gamma") c.gamma = parse_double(val, key);
        else if (key == "noise.sigma") c.sigma = parse_double(val, key);
        else if (key == "noise.c_g") c.c_g = parse_double(val, key);
        else if (key == "noise.cutoff") c.noise_cutoff = int(parse_double(val, key));
        else if (key == "solver.n") c.n_cutoff = int(parse_double(val, key));
        else if (key == "solver.nu") c.nu_override = parse_double(val, key);
        else if (key == "parameters.delta") c.delta = parse_double(val, key);
        else if (key == "parameters.beta") c.beta = parse_double(val, key);
        else if (key == "parameters.p") c.p_exp = parse_double(val, key);
        else if (key == "parameters.alpha") c.alpha = parse_double(val, key);
        else if (key == "parameters.q") c.q_exp = parse_double(val, key);
        else if (key == "parameters.k") c.k_exp = parse_double(val, key);
        else if (key == "parameters.L") c.L = parse_double(val, key);
        else if (key == "parameters.K") c.K = int(parse_double(val, key));
        else if (key == "parameters.eps") c.eps = parse_double(val, key);
        else if (key == "parameters.lambda") c.lambda = parse_double(val, key);
        else if (key == "wild.l") {
            l_seen = true;
            std::istringstream ls(val);
            std::string item;
            while (std::getline(ls, item, ',')) {
                item = trim(item);
                if (!item.empty()) c.l_list.push_back(parse_double(item, key));
            }
        } else if (key == "run.seed") {
            c.seed = uint64_t(parse_double(val, key));
        } else if (key == "run.ensemble") {
            c.ensemble = int(parse_double(val, key));
        } else if (key == "run.out") {
            c.out = val;
        } else if (key == "run.candidates") {
            c.candidates = val;
        } else {
            throw std::invalid_argument("config: unknown key " + key);
        }
    }
    if (!l_seen) c.l_list = {2.0};
    return c;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("config: cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

std::string emit_config(const RunConfig& c) {
    std::ostringstream os;
    os << "[grid]\n"
       << "N = " << c.N << "\n"
       << "dt = " << format_double(c.dt) << "\n"
       << "T = " << format_double(c.T) << "\n\n"
       << "[noise]\n"
       << "gamma = " << format_double(c.gamma) << "\n"
       << "sigma = " << format_double(c.sigma) << "\n"
       << "c_g = " << format_double(c.c_g) << "\n"
       << "cutoff = " << c.noise_cutoff << "\n\n"
       << "[solver]\n"
       << "n = " << c.n_cutoff << "\n"
       << "nu = " << format_double(c.nu_override) << "\n\n"
       << "[parameters]\n"
       << "delta = " << format_double(c.delta) << "\n"
       << "beta = " << format_double(c.beta) << "\n"
       << "p = " << format_double(c.p_exp) << "\n"
       << "alpha = " << format_double(c.alpha) << "\n"
       << "q = " << format_double(c.q_exp) << "\n"
       << "k = " << format_double(c.k_exp) << "\n"
       << "L = " << format_double(c.L) << "\n"
       << "K = " << c.K << "\n"
       << "eps = " << format_double(c.eps) << "\n"
       << "lambda = " << format_double(c.lambda) << "\n\n"
       << "[wild]\n"
       << "l = ";
    for (size_t i = 0; i < c.l_list.size(); ++i)
        os << (i ? ", " : "") << format_double(c.l_list[i]);
    os << "\n\n"
       << "[run]\n"
       << "seed = " << c.seed << "\n"
       << "ensemble = " << c.ensemble << "\n"
       << "out = " << c.out << "\n";
    if (!c.candidates.empty()) os << "candidates = " << c.candidates << "\n";
    return os.str();
}

}  // namespace euler
