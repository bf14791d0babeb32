// Minimal tour: build the three structures over the same points and ask which
// colors hold at least a third of a range.

#include <iostream>

#include "taudom/taudom.hpp"

using namespace taudom;

int main() {
    // employees: (age, salary) -> job code
    std::vector<ColoredPoint> staff = {
        {{34, 48'000}, 0}, {{41, 52'000}, 0}, {{29, 61'000}, 1}, {{45, 55'000}, 0},
        {{52, 47'000}, 2}, {{38, 58'000}, 1}, {{47, 49'000}, 0}, {{56, 51'000}, 2},
    };
    const Tau third(1, 3);

    StaticRangeTree tree(staff, third, 2);
    const Rect mid_career({40, 45'000}, {60, 60'000});
    std::cout << "jobs held by >= 1/3 of 40-60 year olds earning 45k-60k:";
    for (ColorId c : tree.query(mid_career)) std::cout << ' ' << c;
    std::cout << "\n";

    // 1-D static on salaries alone
    std::vector<ColoredPoint> salaries;
    for (const auto& p : staff) salaries.emplace_back(p.coords[1], p.color);
    ExpTree exp(salaries, third, ExpVariant::per_node_index);
    std::cout << "jobs with >= 1/3 share among salaries 47k-55k:";
    for (ColorId c : exp.query(47'000, 55'000)) std::cout << ' ' << c;
    std::cout << "\n";

    // dynamic: a hire and a departure
    DynTree1D dyn(salaries, third, DynVariant::counted);
    dyn.insert(50'000, 2);
    dyn.erase(61'000, 1);
    std::cout << "after one hire and one departure:";
    for (ColorId c : dyn.query(47'000, 55'000)) std::cout << ' ' << c;
    std::cout << "\n";
    return 0;
}
