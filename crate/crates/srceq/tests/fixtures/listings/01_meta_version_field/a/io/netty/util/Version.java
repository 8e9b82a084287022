package io.netty.util;

/**
 * Exposes the artifact version and build information of this library.
 */
public final class Version {

    public static final String ID = "3.10.6.Final-5ab1f5b";

    public static String identify() {
        return ID;
    }

    private Version() {
    }
}
