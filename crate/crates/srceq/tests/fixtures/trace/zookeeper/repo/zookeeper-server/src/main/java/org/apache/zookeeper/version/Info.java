package org.apache.zookeeper.version;

public interface Info {
    int MAJOR = ${version.major};
    int MINOR = ${version.minor};
    int MICRO = ${version.micro};
    String QUALIFIER = ${version.qualifier};
    String REVISION_HASH = ${mvngit.commit.id};
    String BUILD_DATE = ${build.time};
}
