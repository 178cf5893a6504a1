#ifndef ccds_deal_hpp
#define ccds_deal_hpp

namespace ccds {

/*! CDS economics. The reference name is always party 0; the investor buys
    protection from the counterparty and pays a continuous premium. Rates are
    continuously compounded, times are year fractions, notional is 1. */
struct DealSpec {
    int protectionBuyer = 1;
    int protectionSeller = 2;
    double premium = 0.0;                // S, per year
    double maturity = 5.0;               // T, years
    double collateralRate = 0.02;        // c
    double collateralReturn = 0.0;       // y = r - c
    double foreignCollateralSpread = 0.0; // y^(i,j), 0 for domestic collateral
    double coverageBuyer = 1.0;          // delta^1
    double coverageSeller = 1.0;         // delta^2

    void validate() const;
};

//! protection / annuity decomposition of the pre-default value
struct LegValues {
    double protection = 0.0; // PV of the (1-R^0)-weighted default leg
    double annuity = 0.0;    // PV of a unit continuous premium stream

    double parSpread() const;
    double value(double premium) const { return protection - premium * annuity; }
};

//! first-order value decomposition plus the risk-free reference
struct PriceBreakdown {
    double vBar = 0.0; // perfect-collateral value
    double cca = 0.0;  // (nabla V)^1
    double cva = 0.0;  // (nabla V)^2
    double vRf = 0.0;  // default-risk-free reference value
    double rfGap = 0.0; // vRf - vBar

    double firstOrderValue() const { return vBar + cca + cva; }
};

} // namespace ccds

#endif
