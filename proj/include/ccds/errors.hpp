#ifndef ccds_errors_hpp
#define ccds_errors_hpp

#include <sstream>
#include <stdexcept>
#include <string>

namespace ccds {

//! thrown when a numerical routine cannot meet its accuracy contract
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

//! thrown when a configuration file is malformed; carries the offending field path
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string fieldPath, const std::string& what)
        : std::runtime_error(fieldPath + ": " + what), fieldPath_(std::move(fieldPath)) {}
    const std::string& fieldPath() const { return fieldPath_; }

private:
    std::string fieldPath_;
};

} // namespace ccds

// input-contract violations
#define CCDS_REQUIRE(condition, message)                                                           \
    do {                                                                                           \
        if (!(condition)) {                                                                        \
            std::ostringstream ccds_msg_;                                                          \
            ccds_msg_ << message;                                                                  \
            throw std::invalid_argument(ccds_msg_.str());                                          \
        }                                                                                          \
    } while (false)

// numerical-contract violations (quadrature/ODE accuracy failures)
#define CCDS_NUMERIC_CHECK(condition, message)                                                     \
    do {                                                                                           \
        if (!(condition)) {                                                                        \
            std::ostringstream ccds_msg_;                                                          \
            ccds_msg_ << message;                                                                  \
            throw ccds::NumericalError(ccds_msg_.str());                                           \
        }                                                                                          \
    } while (false)

#endif
