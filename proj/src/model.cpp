#include "ginibre/model.hpp"

#include <cmath>
#include <stdexcept>

namespace ginibre {

void ModelParams::validate() const {
    if (m < 1) throw std::invalid_argument("m must be >= 1");
    if (!(beta > 1.0) || !std::isfinite(beta)) throw std::invalid_argument("beta must be > 1");
    if (!(theta >= 0.0) || !std::isfinite(theta)) throw std::invalid_argument("theta must be a finite value >= 0");
}

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

std::string_view to_string(Method method) {
    switch (method) {
        case Method::analytic: return "analytic";
        case Method::mc_raw: return "mc_raw";
        case Method::mc_serving_marg: return "mc_serving_marg";
        case Method::mc_full_marg: return "mc_full_marg";
    }
    return "unknown";
}

Method parse_method(std::string_view name) {
    if (name == "analytic") return Method::analytic;
    if (name == "mc_raw") return Method::mc_raw;
    if (name == "mc_serving_marg") return Method::mc_serving_marg;
    if (name == "mc_full_marg") return Method::mc_full_marg;
    throw std::invalid_argument("unknown method '" + std::string(name) + "'");
}

}  // namespace ginibre
