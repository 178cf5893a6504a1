#ifndef ccds_copula_hpp
#define ccds_copula_hpp

#include <span>
#include <vector>

namespace ccds {

enum class CopulaFamily { Clayton, Product };

//! Below this value the Clayton parameter is collapsed to the product copula;
//! the generator family is only defined for alpha > 0 and the alpha -> 0 limit
//! is exactly independence.
inline constexpr double kClaytonAlphaFloor = 1e-12;

/*! Clayton / product copula with exact first, second and higher mixed partials.

    Clayton: C(u) = (sum_i u_i^(-alpha) - n)^(-1/alpha) for an (n+1)-dim vector.
    All evaluations run through log space so that tiny marginals (long horizons)
    do not underflow, and the small-alpha regime is handled with expm1/log1p so
    the product-copula limit is reached smoothly.
*/
struct CopulaSpec {
    CopulaFamily family = CopulaFamily::Clayton;
    double alpha = 0.0;
    int dim = 2;

    static CopulaSpec clayton(double alpha, int dim);
    static CopulaSpec product(int dim);

    void validate() const;
    bool effectivelyProduct() const {
        return family == CopulaFamily::Product || alpha < kClaytonAlphaFloor;
    }

    //! C(u)
    double value(std::span<const double> u) const;
    //! ln C(u)
    double logValue(std::span<const double> u) const;
    //! dC/du_i
    double partial(std::span<const double> u, int i) const;
    //! d2C/du_i du_j, i != j
    double partial2(std::span<const double> u, int i, int j) const;
    //! mixed partial over the index set D (non-empty, |D| <= dim-1)
    double subsetPartial(std::span<const double> u, std::span<const int> D) const;
    //! ln of the above
    double logSubsetPartial(std::span<const double> u, std::span<const int> D) const;

private:
    void checkArgs(std::span<const double> u) const;
};

} // namespace ccds

#endif
