package com.github.javaparser;

/**
 * Build parameters captured when this artifact was produced.
 */
public class JavaParserBuild {
    public static final String PROJECT_VERSION = "3.25.8";
    public static final String PROJECT_NAME = "javaparser-core";
    public static final String MAVEN_VERSION = "3.9.6";
    public static final String MAVEN_BUILD_VERSION = "Apache Maven 3.9.6 (bc0240f3c744dd6b6ec2920b3cd08dcc295161ae)";
    public static final String MAVEN_BUILD_TIMESTAMP = "2024-03-02T08:11:45Z";
    public static final String JAVA_VENDOR ="Eclipse Adoptium";
    public static final String JAVA_VERSION = "11.0.22";
    public static final String OS_NAME = "Linux";
}
