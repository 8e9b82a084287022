package org.apache.zookeeper.version;

public interface Info {
    int MAJOR = 3;
    int MINOR = 9;
    int MICRO = 1;
    String QUALIFIER = null;
    String REVISION_HASH = "${mvngit.commit.id}";
    String BUILD_DATE = "2024-01-19 22:03 UTC";
}
