package app;

/**
 * Player component.
 */
public class Player {
    // behaviour
    public int m1() { return 1; }
}
