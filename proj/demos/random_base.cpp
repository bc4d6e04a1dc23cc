// Direct-downlink verdicts as the base-station fading varies, then the random-base verdict.
#include <iostream>

#include "fadingld/fadingld.hpp"

int main(int argc, char** argv) {
    using namespace fadingld;
    std::string path = argc > 1 ? argv[1] : "scenarios/random_base.ini";
    Scenario sc = load_scenario(path);
    std::array<double, 4> b{-1, -1, -1, 0.0}, c{1, 1, 1, 0.6};
    for (double u = 1.0; u <= 2.0001; u += 0.125)
        std::cout << "F_o=" << u << "  " << classify_fixed(sc.model.with_base(u), b, c).record() << "\n";
    DecayVerdict v = classify_random_base(sc.model, b, c);
    std::cout << "random F_o: " << v.record() << " critical_mass=" << v.critical_mass << "\n";
}
