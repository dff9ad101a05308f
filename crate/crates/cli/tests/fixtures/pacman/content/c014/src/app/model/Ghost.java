package app.model;

/**
 * Ghost component.
 */
public class Ghost {
    // behaviour
    public int m1() { return 1; }
    public int m2() { return 2; }
}
