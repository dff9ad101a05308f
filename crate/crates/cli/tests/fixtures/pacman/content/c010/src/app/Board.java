package app;

/**
 * Board component.
 */
public class Board {
    // behaviour
    public int m1() { return 1; }
    public int m2() { return 2; }
    public int m3() { return 3; }
    public int m4() { return 4; }
}
