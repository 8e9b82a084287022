package io.restassured.internal;

public class RequestSpecificationImpl implements groovy.lang.GroovyObject {

    public java.lang.String getBaseUri() {
        return null;
    }

    public java.lang.Object getConfig() {
        return null;
    }

    public void setPort(int port) {
    }

    public java.lang.String authentication() {
        return null;
    }
}
