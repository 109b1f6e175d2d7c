// Acceptance suite placeholder; the full criterion runner lands after the
// library builds green.
#include <iostream>

int main() {
    std::cout << "acceptance suite not yet implemented\n";
    return 1;
}
