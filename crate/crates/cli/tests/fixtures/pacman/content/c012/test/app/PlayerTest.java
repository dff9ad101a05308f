package app;

import junit.framework.TestCase;

public class PlayerTest extends TestCase {
    public void testCase1() { assertEquals(1, 1); }
    public void testCase2() { assertEquals(2, 2); }
    public void testCase3() { assertEquals(3, 3); }
}
