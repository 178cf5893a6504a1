#ifndef ccds_scenario_hpp
#define ccds_scenario_hpp

#include <map>
#include <optional>
#include <set>

namespace ccds {

//! Realized default pattern: which parties have defaulted by `clock` and when.
struct ScenarioState {
    double clock = 0.0;
    std::map<int, double> defaulted; // party -> default time

    static ScenarioState allAlive(double t) { return ScenarioState{t, {}}; }

    ScenarioState withDefault(int party, double tau) const {
        ScenarioState next = *this;
        next.defaulted.emplace(party, tau);
        return next;
    }

    bool isAlive(int party) const { return defaulted.find(party) == defaulted.end(); }

    std::optional<double> defaultTime(int party) const {
        auto it = defaulted.find(party);
        if (it == defaulted.end())
            return std::nullopt;
        return it->second;
    }

    void validate(int dim) const;
};

//! Party set S kept alive under the measure change; defaults may be recorded
//! only among the complement C' = C \ S. Empty S means no change of measure.
struct SurvivalSet {
    std::set<int> members;

    static SurvivalSet of(std::initializer_list<int> parties) { return SurvivalSet{parties}; }
    static SurvivalSet none() { return SurvivalSet{}; }

    bool contains(int party) const { return members.count(party) > 0; }
    void validate(int dim) const;
};

} // namespace ccds

#endif
