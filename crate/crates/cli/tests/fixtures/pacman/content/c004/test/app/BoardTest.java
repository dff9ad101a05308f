package app;

import junit.framework.TestCase;

public class BoardTest extends TestCase {
    public void testCase1() { assertEquals(1, 1); }
}
