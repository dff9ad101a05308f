package app;

/**
 * Ghost component.
 */
public class Ghost {
    // behaviour
    public int m1() { return 1; }
}
