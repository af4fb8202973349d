#include "selmut/serialize.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <system_error>

namespace selmut {

std::string format_double(double value) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, value);
    if (res.ec != std::errc{}) throw std::runtime_error("format_double: conversion failed");
    return std::string(buf, res.ptr);
}

namespace {

double parse_double(const std::string& text) {
    double value = 0.0;
    const char* first = text.data();
    const char* last = first + text.size();
    const auto res = std::from_chars(first, last, value);
    if (res.ec != std::errc{} || res.ptr != last) {
        throw MeasureError("cannot parse number '" + text + "'");
    }
    return value;
}

json number_or_inf(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return v;
}

}  // namespace

json measure_to_json(const Measure& u) {
    json atoms = json::array();
    for (const auto& a : u.atoms()) atoms.push_back({{"x", a.x}, {"m", a.m}});
    return {{"atoms", atoms}};
}

Measure measure_from_json(const json& j, double bound) {
    if (!j.is_object() || !j.contains("atoms") || !j.at("atoms").is_array()) {
        throw MeasureError("measure JSON must be an object with an \"atoms\" array");
    }
    std::vector<Atom> atoms;
    for (const auto& a : j.at("atoms")) {
        if (!a.is_object() || !a.contains("x") || !a.contains("m") || !a.at("x").is_number() ||
            !a.at("m").is_number()) {
            throw MeasureError("each atom needs numeric \"x\" and \"m\"");
        }
        atoms.push_back({a.at("x").get<double>(), a.at("m").get<double>()});
    }
    return Measure::from_atoms(std::move(atoms), bound);
}

void write_measure_csv(std::ostream& os, const Measure& u) {
    os << "x,m\n";
    for (const auto& a : u.atoms()) os << format_double(a.x) << ',' << format_double(a.m) << '\n';
}

Measure read_measure_csv(std::istream& is, double bound) {
    std::string line;
    if (!std::getline(is, line) || line != "x,m") throw MeasureError("measure CSV must start with \"x,m\"");
    std::vector<Atom> atoms;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) throw MeasureError("malformed CSV row '" + line + "'");
        atoms.push_back({parse_double(line.substr(0, comma)), parse_double(line.substr(comma + 1))});
    }
    return Measure::from_atoms(std::move(atoms), bound);
}

const char* to_string(LimitCase c) { return c == LimitCase::case1 ? "case1" : "case2"; }

const char* to_string(StopReason r) {
    return r == StopReason::converged ? "converged" : "max_iterations";
}

json limit_to_json(const LimitResult& limit) {
    json j;
    j["case"] = to_string(limit.case_tag);
    j["root"] = limit.root ? json(*limit.root) : json(nullptr);
    j["criterion"] = number_or_inf(limit.criterion);
    j["atoms"] = measure_to_json(limit.ac_part).at("atoms");
    j["atom_at_a"] = limit.atom_at_a;
    j["a"] = limit.a;
    if (limit.solve) {
        j["solver"] = {{"residual", limit.solve->residual}, {"iterations", limit.solve->iterations}};
    }
    return j;
}

json report_to_json(const CheckReport& report) {
    json j;
    j["check"] = report.check;
    j["passed"] = report.passed;
    j["worst_violation"] = number_or_inf(report.worst_violation);
    j["witness"] = report.witness ? json(*report.witness) : json(nullptr);
    j["seeds"] = report.seeds;
    j["cases"] = report.cases;
    j["skipped"] = report.skipped;
    j["tolerance"] = report.tolerance;
    if (!report.metrics.empty()) {
        json m = json::object();
        for (const auto& [k, v] : report.metrics) m[k] = number_or_inf(v);
        j["metrics"] = m;
    }
    if (!report.series.empty()) j["series"] = report.series;
    return j;
}

void write_diagnostics_csv(std::ostream& os, const Trajectory& trajectory) {
    os << "iteration,tv_delta,mean_fitness,atom_mass_at_M,cycle_time\n";
    for (const auto& d : trajectory.diagnostics) {
        os << d.iteration << ',' << format_double(d.tv_delta) << ',' << format_double(d.mean_fitness)
           << ',' << format_double(d.atom_mass_at_M) << ',';
        if (d.cycle_time) os << format_double(*d.cycle_time);
        os << '\n';
    }
}

}  // namespace selmut
