#pragma once

#include <fstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "resalloc/certificates.hpp"
#include "resalloc/instance.hpp"

namespace resalloc {

using ordered_json = nlohmann::ordered_json;

namespace detail {

inline ordered_json cost_to_json(const CostFunction& f) {
    if (!f.quadratic)
        throw std::invalid_argument("instance_to_json: only quadratic costs are serializable");
    ordered_json j;
    j["type"] = "quadratic";
    j["alpha"] = f.quadratic->alpha;
    j["mu"] = f.quadratic->mu;
    return j;
}

inline CostFunction cost_from_json(const ordered_json& j) {
    if (!j.is_object() || j.value("type", "") != "quadratic")
        throw std::invalid_argument("instance_from_json: unknown cost type");
    return make_quadratic_cost(j.at("alpha").get<double>(), j.at("mu").get<double>());
}

}  // namespace detail

inline ordered_json instance_to_json(const ScalarInstance& inst,
                                     const ordered_json& meta = nullptr) {
    ordered_json j;
    j["kind"] = "scalar";
    j["C"] = inst.demand;
    j["costs"] = ordered_json::array();
    for (const auto& f : inst.costs) j["costs"].push_back(detail::cost_to_json(f));
    if (!meta.is_null()) j["meta"] = meta;
    return j;
}

inline ordered_json instance_to_json(const VectorInstance& inst,
                                     const ordered_json& meta = nullptr) {
    ordered_json j;
    j["kind"] = "vector";
    j["m"] = inst.products;
    j["c"] = inst.demands;
    j["costs"] = ordered_json::array();
    for (const auto& cost : inst.costs) {
        if (!cost.separable())
            throw std::invalid_argument(
                "instance_to_json: non-separable costs are not serializable");
        ordered_json row = ordered_json::array();
        for (const auto& f : cost.per_product) row.push_back(detail::cost_to_json(f));
        j["costs"].push_back(row);
    }
    if (!meta.is_null()) j["meta"] = meta;
    return j;
}

/// An instance read back from disk, either form, with its metadata block.
struct LoadedInstance {
    bool is_vector = false;
    ScalarInstance scalar;
    VectorInstance vector;
    ordered_json meta;
};

inline LoadedInstance instance_from_json(const ordered_json& j) {
    LoadedInstance out;
    const std::string kind = j.value("kind", "");
    if (j.contains("meta")) out.meta = j.at("meta");
    if (kind == "scalar") {
        out.scalar.demand = j.at("C").get<double>();
        for (const auto& c : j.at("costs")) out.scalar.costs.push_back(detail::cost_from_json(c));
        return out;
    }
    if (kind == "vector") {
        out.is_vector = true;
        out.vector.products = j.at("m").get<std::size_t>();
        out.vector.demands = j.at("c").get<std::vector<double>>();
        for (const auto& row : j.at("costs")) {
            ProducerCost pc;
            for (const auto& c : row) pc.per_product.push_back(detail::cost_from_json(c));
            out.vector.costs.push_back(std::move(pc));
        }
        return out;
    }
    throw std::invalid_argument("instance_from_json: kind must be scalar or vector");
}

inline void write_json_file(const ordered_json& j, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << j.dump(2) << '\n';
    if (!out) throw std::runtime_error("write failed: " + path);
}

inline ordered_json read_json_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open for reading: " + path);
    return ordered_json::parse(in);
}

inline LoadedInstance load_instance(const std::string& path) {
    return instance_from_json(read_json_file(path));
}

inline ordered_json certificate_to_json(const Certificate& cert) {
    ordered_json j;
    j["method"] = method_name(cert.method);
    j["iterations"] = cert.iterations;
    j["p_max"] = cert.p_max;
    j["R"] = cert.radius;
    j["L_psi"] = cert.lipschitz;
    j["mu"] = cert.mu;
    j["gap_bound"] = cert.gap_bound;
    j["measured_gap"] = cert.measured_gap;
    j["infeas_bound"] = cert.infeas_bound;
    j["measured_infeas"] = cert.measured_infeas;
    if (cert.method == Method::accelerated)
        j["infeas_bound_radius_scaled"] = cert.infeas_bound_radius_scaled;
    if (cert.method == Method::subgradient) j["epsilon"] = cert.epsilon;
    j["bound_applicable"] = cert.bound_applicable;
    j["pass_gap"] = cert.pass_gap;
    j["pass_infeas"] = cert.pass_infeas;
    return j;
}

}  // namespace resalloc
