#include "hgdo/batch.hpp"

#include <exception>

namespace hgdo::sim {

std::vector<SimResult> run_batch(const std::vector<ScenarioConfig>& configs) {
    const long n = static_cast<long>(configs.size());
    std::vector<SimResult> out(configs.size());
    std::vector<std::exception_ptr> errors(configs.size());

#pragma omp parallel for schedule(dynamic, 1)
    for (long i = 0; i < n; ++i) {
        try {
            out[i] = run_scenario(configs[i]);
        } catch (...) {
            errors[i] = std::current_exception();
        }
    }

    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);
    return out;
}

std::vector<SimResult> run_batch_serial(const std::vector<ScenarioConfig>& configs) {
    std::vector<SimResult> out;
    out.reserve(configs.size());
    for (const auto& c : configs) out.push_back(run_scenario(c));
    return out;
}

}  // namespace hgdo::sim
