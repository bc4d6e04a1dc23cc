// Prints p(c) for the four modes of the Hertzian disk scenario.
#include <iostream>

#include "fadingld/fadingld.hpp"

int main(int argc, char** argv) {
    using namespace fadingld;
    std::string path = argc > 1 ? argv[1] : "scenarios/hertz_disk.ini";
    Scenario sc = load_scenario(path);
    std::vector<double> cs;
    for (int i = 1; i <= 20; ++i) cs.push_back(sc.model.qos().c_plus() * i / 20.0);
    std::cout << "c";
    for (Mode m : all_modes) std::cout << ',' << to_string(m);
    std::cout << "\n";
    std::vector<std::vector<std::pair<double, double>>> curves;
    for (Mode m : all_modes) curves.push_back(frustration_curve(sc.model, m, cs, {{24, 24, 12}}));
    for (std::size_t i = 0; i < cs.size(); ++i) {
        std::cout << cs[i];
        for (const auto& cv : curves) std::cout << ',' << cv[i].second;
        std::cout << "\n";
    }
}
