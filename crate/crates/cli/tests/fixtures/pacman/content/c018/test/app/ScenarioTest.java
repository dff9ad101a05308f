package app;

import org.junit.Before;
import org.junit.Test;

public class ScenarioTest {
    @Before
    public void setUp() { }
    public void testFlow1() { }
    public void testFlow2() { }
}
