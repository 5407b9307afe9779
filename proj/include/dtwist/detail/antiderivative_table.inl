#pragma once

#include <boost/math/quadrature/gauss.hpp>

namespace dtwist {

template <class F, class DF>
AntiderivativeTable::AntiderivativeTable(F&& f, DF&& df, int intervals)
    : h_(1.0 / intervals)
{
    std::vector<double> fv(intervals + 1);
    std::vector<double> dfv(intervals + 1);
    std::vector<double> cells(intervals);
    for (int i = 0; i <= intervals; ++i) {
        double v = i * h_;
        fv[i] = f(v);
        dfv[i] = df(v);
    }
    using Rule = boost::math::quadrature::gauss<double, 10>;
    for (int i = 0; i < intervals; ++i) {
        cells[i] = Rule::integrate(f, i * h_, (i + 1) * h_);
    }
    fill(fv, dfv, cells);
}

} // namespace dtwist
