#include "euler/trajectory.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace euler {

namespace fs = std::filesystem;
using nlohmann::json;

void DissipativeTrajectory::validate_sizes() const {
    const size_t n = t.size();
    auto check = [&](size_t m, const char* what) {
        if (m != n) throw std::runtime_error(std::string("trajectory: ragged series: ") + what);
    };
    check(xnorm_sq.size(), "xnorm_sq");
    check(z.size(), "z");
    check(dissipation.size(), "dissipation");
    check(trace_y.size(), "trace_y");
    for (const auto& [name, s] : observables) check(s.size(), name.c_str());
    if (!x.empty()) check(x.size(), "x snapshots");
    if (!y.empty()) check(y.size(), "y snapshots");
}

namespace {

std::string field_name(const char* prefix, int j) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%s_%04d.fld", prefix, j);
    return buf;
}

}  // namespace

void save_trajectory(const std::string& dir, const DissipativeTrajectory& traj) {
    traj.validate_sizes();
    fs::create_directories(dir);

    // scalar CSV: fixed columns first, then observables in map order
    {
        std::ofstream csv(fs::path(dir) / "scalars.csv");
        csv.precision(17);
        csv << "t,xnorm_sq,z,dissipation,trace_y";
        for (const auto& [name, s] : traj.observables) csv << "," << name;
        csv << "\n";
        for (int j = 0; j < traj.times(); ++j) {
            csv << traj.t[j] << "," << traj.xnorm_sq[j] << "," << traj.z[j] << ","
                << traj.dissipation[j] << "," << traj.trace_y[j];
            for (const auto& [name, s] : traj.observables) csv << "," << s[j];
            csv << "\n";
        }
        if (!csv) throw std::runtime_error("trajectory: cannot write scalars.csv");
    }

    for (size_t j = 0; j < traj.x.size(); ++j)
        save_field((fs::path(dir) / field_name("x", int(j))).string(), traj.x[j]);
    for (size_t j = 0; j < traj.y.size(); ++j) {
        SpectralStress rs = to_spectral(traj.y[j]);
        save_field((fs::path(dir) / field_name("y", int(j))).string(), rs);
    }

    json man;
    man["format"] = "trajectory-v1";
    man["N"] = traj.lat.N;
    man["seed"] = traj.seed;
    man["z0"] = traj.z0;
    man["times"] = traj.times();
    man["x_snapshots"] = traj.x.size();
    man["y_snapshots"] = traj.y.size();
    man["metadata"] = traj.metadata;
    {
        std::vector<std::string> names;
        for (const auto& [name, s] : traj.observables) names.push_back(name);
        man["observables"] = names;
    }
    std::ofstream mf(fs::path(dir) / "manifest.json");
    mf << man.dump(2) << "\n";
    if (!mf) throw std::runtime_error("trajectory: cannot write manifest.json");
}

DissipativeTrajectory load_trajectory(const std::string& dir) {
    json man;
    {
        std::ifstream mf(fs::path(dir) / "manifest.json");
        if (!mf) throw std::runtime_error("trajectory: missing manifest in " + dir);
        mf >> man;
    }
    DissipativeTrajectory traj;
    traj.lat = WaveLattice{man.at("N").get<int>()};
    traj.seed = man.at("seed").get<uint64_t>();
    traj.z0 = man.at("z0").get<double>();
    traj.metadata = man.at("metadata").get<std::map<std::string, double>>();
    const int times = man.at("times").get<int>();
    std::vector<std::string> obs_names = man.at("observables").get<std::vector<std::string>>();

    std::ifstream csv(fs::path(dir) / "scalars.csv");
    if (!csv) throw std::runtime_error("trajectory: missing scalars.csv in " + dir);
    std::string line;
    std::getline(csv, line);  // header
    for (auto& name : obs_names) traj.observables[name] = {};
    for (int j = 0; j < times; ++j) {
        if (!std::getline(csv, line))
            throw std::runtime_error("trajectory: scalars.csv truncated");
        std::stringstream ss(line);
        std::string cell;
        auto next = [&]() {
            if (!std::getline(ss, cell, ',')) throw std::runtime_error("trajectory: short CSV row");
            return std::stod(cell);
        };
        traj.t.push_back(next());
        traj.xnorm_sq.push_back(next());
        traj.z.push_back(next());
        traj.dissipation.push_back(next());
        traj.trace_y.push_back(next());
        for (auto& name : obs_names) traj.observables[name].push_back(next());
    }

    const int nx = man.at("x_snapshots").get<int>();
    const int ny = man.at("y_snapshots").get<int>();
    for (int j = 0; j < nx; ++j)
        traj.x.push_back(load_velocity((fs::path(dir) / field_name("x", j)).string()));
    for (int j = 0; j < ny; ++j)
        traj.y.push_back(to_physical(load_stress((fs::path(dir) / field_name("y", j)).string())));
    traj.validate_sizes();
    return traj;
}

}  // namespace euler
